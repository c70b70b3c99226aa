//! Multilinear minimax relaxation (MMR) for bimatrix games.
//!
//! The relaxation is the LP pair
//!
//! ```text
//! (LP)   min δ   s.t. α₁R_ij + α₂C_ij ≤ δ for all cells,  α ∈ S₂
//! (DLP)  max λ   s.t. ⟨R, Q⟩ ≥ λ,  ⟨C, Q⟩ ≥ λ,  Σ Q = 1,  Q ≥ 0
//! ```
//!
//! The primal is a one-dimensional convex piecewise-linear minimisation and
//! is solved exactly by [`minimize_alpha`]. The dual is solved either by the
//! general simplex ([`MmrMethod::Simplex`]) or by reading a basic optimal `Q`
//! off the tight cells at `α*` ([`MmrMethod::Specialized`]). The MMR
//! strategies are the row and column marginals of `Q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{normalize, BimatrixGame, MixedProfile, PayoffPair, Weight};
use crate::linalg::Matrix;
use crate::lp::{solve_lp_with, LpError, LpOptions, LpProblem, LpStatus, Relation, Sense};
use crate::nash::{is_nash, NashEquilibrium};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MmrError {
    #[error("duality gap |δ* - λ*| = {gap:e} exceeds tolerance (δ* = {delta}, λ* = {lambda})")]
    DualityGapExceeded { delta: f64, lambda: f64, gap: f64 },
    #[error("LP solver: {0}")]
    Lp(#[from] LpError),
    #[error("LP solver finished with status {0:?}")]
    LpStatus(LpStatus),
    #[error("no cell yields a weight consistent with δ* = {0}")]
    NoConsistentPair(f64),
    #[error("tight cell ({0}, {1}) has R = C = δ*")]
    DegenerateCell(usize, usize),
    #[error("marginals of Q sum to ({0}, {1})")]
    MarginalMass(f64, f64),
    #[error("profile at index {0} is not a Nash equilibrium")]
    NotAnEquilibrium(usize),
    #[error("specialized path could not build Q: {0}")]
    Specialized(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MmrMethod {
    /// Simplex up to `auto_simplex_max_cells` cells, specialized above.
    Auto,
    Simplex,
    Specialized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmrOptions {
    pub method: MmrMethod,
    pub lp: LpOptions,
    /// Relative tolerance on `|δ* - λ*|`.
    pub duality_tol: f64,
    pub auto_simplex_max_cells: usize,
}

impl Default for MmrOptions {
    fn default() -> Self {
        MmrOptions {
            method: MmrMethod::Auto,
            lp: LpOptions::default(),
            duality_tol: 1e-8,
            auto_simplex_max_cells: 2500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmrSolution {
    /// Joint distribution over cells.
    pub q: Matrix,
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub alpha_star: Weight,
    /// Optimum of the primal (LP).
    pub delta_star: f64,
    /// Optimum of the dual (DLP).
    pub lambda_star: f64,
    /// Payoffs at `(x*, y*)`.
    pub payoffs: PayoffPair,
    /// `(⟨R, Q⟩, ⟨C, Q⟩)`.
    pub joint_payoffs: PayoffPair,
    /// Row and column marginal sums before renormalisation.
    pub marginal_mass: (f64, f64),
    /// `δ* - A₀[α*, p*]`; zero when the product of marginals attains the
    /// saddle value.
    pub saddle_gap: f64,
    pub method: MmrMethod,
    pub lp_pivots: Option<usize>,
}

impl MmrSolution {
    pub fn profile(&self) -> MixedProfile {
        MixedProfile {
            x: self.x_star.clone(),
            y: self.y_star.clone(),
        }
    }

    /// Cells with `q_ij > tol`, in row-major order.
    pub fn support(&self, tol: f64) -> Vec<(usize, usize)> {
        let m = self.q.cols();
        self.q
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > tol)
            .map(|(k, _)| (k / m, k % m))
            .collect()
    }
}

/// The dual LP over variables `q_ij` (row-major) followed by `λ`.
///
/// `λ` gets the lower bound `min(0, max_ij min(R_ij, C_ij))`. Every pure
/// cell is feasible, so the optimum is at least `max_ij min(R_ij, C_ij)` and
/// the bound never binds; it only saves splitting `λ` into two columns.
pub fn build_dlp(g: &BimatrixGame) -> LpProblem {
    let cells = g.n() * g.m();
    let mut a = Vec::with_capacity(3 * (cells + 1));
    a.extend_from_slice(g.row_matrix().as_slice());
    a.push(-1.0);
    a.extend_from_slice(g.col_matrix().as_slice());
    a.push(-1.0);
    a.extend(std::iter::repeat_n(1.0, cells));
    a.push(0.0);

    let mut objective = vec![0.0; cells + 1];
    objective[cells] = 1.0;
    let (_, pure_lower) = crate::game::pure_minimax(g);
    let mut lower = vec![Some(0.0); cells + 1];
    lower[cells] = Some(pure_lower.min(0.0));
    LpProblem {
        sense: Sense::Max,
        objective,
        constraints: Matrix::from_vec(3, cells + 1, a).expect("dlp shape"),
        relations: vec![Relation::Ge, Relation::Ge, Relation::Eq],
        rhs: vec![0.0, 0.0, 1.0],
        lower,
        upper: vec![None; cells + 1],
    }
}

/// `δ(α₁) = max_ij (α₁R_ij + (1 - α₁)C_ij)`.
pub fn delta_at(g: &BimatrixGame, alpha_row: f64) -> f64 {
    let w = 1.0 - alpha_row;
    g.row_matrix()
        .as_slice()
        .iter()
        .zip(g.col_matrix().as_slice())
        .map(|(r, c)| alpha_row * r + w * c)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact minimiser of `δ(α₁)` over `[0, 1]`.
///
/// Each cell contributes the line `C_ij + α₁(R_ij - C_ij)`. The upper
/// envelope is built once; its minimum sits at an endpoint or at the
/// breakpoint where the envelope slope changes sign. A flat minimum returns
/// the midpoint of the flat segment.
pub fn minimize_alpha(g: &BimatrixGame) -> (Weight, f64) {
    let hull = upper_envelope(g);
    let alpha = envelope_argmin(&hull);
    let w = Weight::from_row_weight(alpha);
    (w, delta_at(g, alpha))
}

#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
}

impl Line {
    fn meet(&self, other: &Line) -> f64 {
        (self.intercept - other.intercept) / (other.slope - self.slope)
    }
}

fn upper_envelope(g: &BimatrixGame) -> Vec<Line> {
    let mut lines: Vec<Line> = g
        .row_matrix()
        .as_slice()
        .iter()
        .zip(g.col_matrix().as_slice())
        .map(|(&r, &c)| Line {
            slope: r - c,
            intercept: c,
        })
        .collect();
    lines.sort_by(|a, b| {
        a.slope
            .total_cmp(&b.slope)
            .then(b.intercept.total_cmp(&a.intercept))
    });
    lines.dedup_by(|later, earlier| later.slope == earlier.slope);

    let mut hull: Vec<Line> = Vec::new();
    for l in lines {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b is redundant if l overtakes a no later than b does.
            if a.meet(&l) <= a.meet(&b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    hull
}

fn envelope_argmin(hull: &[Line]) -> f64 {
    // Breakpoint between hull[k] and hull[k + 1].
    let bp = |k: usize| hull[k].meet(&hull[k + 1]);
    // Segments clipped to [0, 1]: (slope, start, end).
    let mut segs: Vec<(f64, f64, f64)> = Vec::new();
    for k in 0..hull.len() {
        let start = if k == 0 { f64::NEG_INFINITY } else { bp(k - 1) };
        let end = if k + 1 == hull.len() { f64::INFINITY } else { bp(k) };
        let (s, e) = (start.max(0.0), end.min(1.0));
        if s < e || (s == e && segs.is_empty() && k + 1 == hull.len()) {
            segs.push((hull[k].slope, s, e));
        }
    }
    if segs.is_empty() {
        // All breakpoints coincide outside the interval's interior; evaluate endpoints.
        let at = |a: f64| hull.iter().map(|l| l.intercept + a * l.slope).fold(f64::NEG_INFINITY, f64::max);
        return if at(0.0) <= at(1.0) { 0.0 } else { 1.0 };
    }
    for &(slope, start, end) in &segs {
        if slope == 0.0 {
            return 0.5 * (start + end);
        }
        if slope > 0.0 {
            return start;
        }
    }
    1.0
}

/// Solves the relaxation with default options.
pub fn solve_mmr(g: &BimatrixGame) -> Result<MmrSolution, MmrError> {
    solve_mmr_with(g, &MmrOptions::default())
}

pub fn solve_mmr_with(g: &BimatrixGame, opts: &MmrOptions) -> Result<MmrSolution, MmrError> {
    let (alpha_star, delta_star) = minimize_alpha(g);
    let method = match opts.method {
        MmrMethod::Auto if g.n() * g.m() <= opts.auto_simplex_max_cells => MmrMethod::Simplex,
        MmrMethod::Auto => MmrMethod::Specialized,
        m => m,
    };

    let (q, lambda_star, lp_pivots) = match method {
        MmrMethod::Simplex => {
            let (q, lambda, pivots) = dual_by_simplex(g, &opts.lp)?;
            (q, lambda, Some(pivots))
        }
        _ => {
            let (q, lambda) = dual_from_tight_cells(g, alpha_star, delta_star)?;
            (q, lambda, None)
        }
    };

    let gap = (delta_star - lambda_star).abs();
    if gap > opts.duality_tol * (1.0 + delta_star.abs()) {
        return Err(MmrError::DualityGapExceeded {
            delta: delta_star,
            lambda: lambda_star,
            gap,
        });
    }

    let mut x_star: Vec<f64> = (0..g.n()).map(|i| q.row(i).iter().sum()).collect();
    let mut y_star = q.vec_mul(&vec![1.0; g.n()]);
    let mass = (x_star.iter().sum::<f64>(), y_star.iter().sum::<f64>());
    if (mass.0 - 1.0).abs() > 1e-7 || (mass.1 - 1.0).abs() > 1e-7 {
        return Err(MmrError::MarginalMass(mass.0, mass.1));
    }
    normalize(&mut x_star);
    normalize(&mut y_star);

    let payoffs = g.payoff_unchecked(&x_star, &y_star);
    let joint_payoffs = PayoffPair {
        row: frobenius(g.row_matrix(), &q),
        col: frobenius(g.col_matrix(), &q),
    };
    let saddle_gap = delta_star - alpha_star.apply(payoffs);
    Ok(MmrSolution {
        q,
        x_star,
        y_star,
        alpha_star,
        delta_star,
        lambda_star,
        payoffs,
        joint_payoffs,
        marginal_mass: mass,
        saddle_gap,
        method,
        lp_pivots,
    })
}

fn frobenius(a: &Matrix, q: &Matrix) -> f64 {
    a.as_slice().iter().zip(q.as_slice()).map(|(x, y)| x * y).sum()
}

fn dual_by_simplex(g: &BimatrixGame, lp: &LpOptions) -> Result<(Matrix, f64, usize), MmrError> {
    let problem = build_dlp(g);
    let sol = solve_lp_with(&problem, lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(MmrError::LpStatus(sol.status));
    }
    let cells = g.n() * g.m();
    let q: Vec<f64> = sol.x[..cells].iter().map(|v| v.max(0.0)).collect();
    let q = Matrix::from_vec(g.n(), g.m(), q).expect("q shape");
    Ok((q, sol.objective, sol.pivots))
}

/// Basic optimal `Q` supported on the cells that attain `δ*` at `α*`.
///
/// With `α*` interior both dual rows are tight, so `⟨R - C, Q⟩ = 0`: mix the
/// tight cell of largest `R - C` with the tight cell of smallest `R - C`.
/// At `α₁* = 0` (resp. `1`) only the column (resp. row) constraint binds and a
/// single tight cell with `R ≥ C` (resp. `C ≥ R`) suffices.
fn dual_from_tight_cells(
    g: &BimatrixGame,
    alpha: Weight,
    delta: f64,
) -> Result<(Matrix, f64), MmrError> {
    let r = g.row_matrix().as_slice();
    let c = g.col_matrix().as_slice();
    let scale = 1.0 + r.iter().chain(c).fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-11 * scale;

    let mut hi: Option<(usize, f64)> = None;
    let mut lo: Option<(usize, f64)> = None;
    for k in 0..r.len() {
        if alpha.row * r[k] + alpha.col * c[k] < delta - tol {
            continue;
        }
        let d = r[k] - c[k];
        if hi.is_none_or(|(_, b)| d > b) {
            hi = Some((k, d));
        }
        if lo.is_none_or(|(_, b)| d < b) {
            lo = Some((k, d));
        }
    }
    let (Some((ka, da)), Some((kb, db))) = (hi, lo) else {
        return Err(MmrError::Specialized("no tight cell at α*".into()));
    };

    let mut q = vec![0.0; r.len()];
    if alpha.row == 0.0 {
        if da < -tol {
            return Err(MmrError::Specialized("no tight cell with R ≥ C at α₁ = 0".into()));
        }
        q[ka] = 1.0;
    } else if alpha.col == 0.0 {
        if db > tol {
            return Err(MmrError::Specialized("no tight cell with C ≥ R at α₁ = 1".into()));
        }
        q[kb] = 1.0;
    } else if da == 0.0 || ka == kb {
        q[ka] = 1.0;
    } else if db == 0.0 {
        q[kb] = 1.0;
    } else if da > 0.0 && db < 0.0 {
        let wa = -db / (da - db);
        q[ka] = wa;
        q[kb] = 1.0 - wa;
    } else {
        return Err(MmrError::Specialized(format!(
            "tight slopes [{db}, {da}] do not straddle zero"
        )));
    }
    let q = Matrix::from_vec(g.n(), g.m(), q).expect("q shape");
    let lambda = frobenius(g.row_matrix(), &q).min(frobenius(g.col_matrix(), &q));
    Ok((q, lambda))
}

/// Recovers `α` from a known `δ*` by finding a cell whose LP inequality can
/// be tight: solve `α₁R_ij + α₂C_ij = δ*`, `α₁ + α₂ = 1` cell by cell and
/// keep the first solution in `S₂` that satisfies every other inequality.
///
/// Cells with `R_ij = C_ij = δ*` make the system rank-deficient and are
/// skipped. If those are the only tight cells, `δ(α)` is flat there and the
/// canonical weight from [`minimize_alpha`] is returned.
pub fn recover_alpha_tight(g: &BimatrixGame, delta_star: f64) -> Result<Weight, MmrError> {
    const FEAS: f64 = 1e-8;
    let r = g.row_matrix().as_slice();
    let c = g.col_matrix().as_slice();
    let mut saw_degenerate = None;
    for k in 0..r.len() {
        let d = r[k] - c[k];
        if d == 0.0 {
            if (c[k] - delta_star).abs() <= FEAS {
                saw_degenerate.get_or_insert(k);
            }
            continue;
        }
        let a = (delta_star - c[k]) / d;
        if !(-FEAS..=1.0 + FEAS).contains(&a) {
            continue;
        }
        let a = a.clamp(0.0, 1.0);
        if delta_at(g, a) <= delta_star + FEAS {
            return Ok(Weight::from_row_weight(a));
        }
    }
    match saw_degenerate {
        Some(_) => Ok(minimize_alpha(g).0),
        None => Err(MmrError::NoConsistentPair(delta_star)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceRecord {
    pub equilibrium: usize,
    pub row_better: bool,
    pub col_better: bool,
    /// `δ* - A₀[α*, p_*]`.
    pub weighted_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub records: Vec<DominanceRecord>,
    /// MMR is at least as good for both players against every equilibrium.
    pub both_better_vs_all: bool,
    /// Some player does at least as well under MMR as in every equilibrium.
    pub one_player_optimal_vs_all: bool,
    /// Every slack is `≥ -1e-7`.
    pub weighted_bound_holds: bool,
}

/// Compares the MMR payoffs against each supplied equilibrium.
pub fn dominance_report(
    g: &BimatrixGame,
    sol: &MmrSolution,
    equilibria: &[NashEquilibrium],
) -> Result<DominanceReport, MmrError> {
    const CMP: f64 = 1e-9;
    let mut records = Vec::with_capacity(equilibria.len());
    for (k, eq) in equilibria.iter().enumerate() {
        let p = eq.profile();
        if !is_nash(g, &p, 1e-6).map_err(|_| MmrError::NotAnEquilibrium(k))? {
            return Err(MmrError::NotAnEquilibrium(k));
        }
        let ne = g.payoff_unchecked(&p.x, &p.y);
        records.push(DominanceRecord {
            equilibrium: k,
            row_better: sol.payoffs.row >= ne.row - CMP,
            col_better: sol.payoffs.col >= ne.col - CMP,
            weighted_slack: sol.delta_star - sol.alpha_star.apply(ne),
        });
    }
    Ok(DominanceReport {
        both_better_vs_all: records.iter().all(|r| r.row_better && r.col_better),
        one_player_optimal_vs_all: records.iter().all(|r| r.row_better)
            || records.iter().all(|r| r.col_better),
        weighted_bound_holds: records.iter().all(|r| r.weighted_slack >= -1e-7),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::random_game;
    use crate::lp::to_standard_form;

    fn example_2x2() -> BimatrixGame {
        BimatrixGame::from_rows(
            &[vec![5.0, 3.0], vec![3.0, 4.0]],
            &[vec![3.0, 2.0], vec![2.0, 1.0]],
        )
        .unwrap()
    }

    fn example_3x3() -> BimatrixGame {
        BimatrixGame::from_rows(
            &[
                vec![0.388, 0.600, 0.761],
                vec![0.059, 0.149, 0.806],
                vec![0.633, 0.850, 0.031],
            ],
            &[
                vec![1.0, 0.132, 0.496],
                vec![0.513, 0.084, 0.946],
                vec![0.0, 0.904, 0.905],
            ],
        )
        .unwrap()
    }

    /// Grid minimum of δ(α₁); independent of the envelope code.
    fn grid_min(g: &BimatrixGame, step: f64) -> (f64, f64) {
        let steps = (1.0 / step).round() as usize;
        (0..=steps)
            .map(|k| {
                let a = k as f64 / steps as f64;
                let v = g
                    .row_matrix()
                    .as_slice()
                    .iter()
                    .zip(g.col_matrix().as_slice())
                    .map(|(r, c)| a * r + (1.0 - a) * c)
                    .fold(f64::NEG_INFINITY, f64::max);
                (a, v)
            })
            .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    #[test]
    fn dlp_matches_printed_program() {
        let p = build_dlp(&example_2x2());
        assert_eq!(p.constraints.row(0), &[5.0, 3.0, 3.0, 4.0, -1.0]);
        assert_eq!(p.constraints.row(1), &[3.0, 2.0, 2.0, 1.0, -1.0]);
        assert_eq!(p.constraints.row(2), &[1.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(p.rhs, vec![0.0, 0.0, 1.0]);
        assert_eq!(p.objective, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(to_standard_form(&p).unwrap().lp.num_vars(), 7);

        let p = build_dlp(&example_3x3());
        assert_eq!(p.num_vars(), 10);
        assert_eq!(&p.constraints.row(0)[..3], &[0.388, 0.600, 0.761]);
        assert_eq!(&p.constraints.row(1)[..3], &[1.0, 0.132, 0.496]);
    }

    #[test]
    fn one_by_one_game() {
        let g = BimatrixGame::from_rows(&[vec![0.7]], &[vec![0.2]]).unwrap();
        let s = solve_mmr(&g).unwrap();
        assert_eq!(s.x_star, vec![1.0]);
        assert_eq!(s.y_star, vec![1.0]);
        assert!((s.lambda_star - 0.2).abs() < 1e-12);
        assert_eq!((s.payoffs.row, s.payoffs.col), (0.7, 0.2));
    }

    #[test]
    fn minimize_alpha_examples() {
        let (w, d) = minimize_alpha(&example_2x2());
        assert_eq!((w.row, w.col), (0.0, 1.0));
        assert_eq!(d, 3.0);
        let (ga, gd) = grid_min(&example_2x2(), 1e-4);
        assert!((ga - w.row).abs() < 1e-6 && (gd - d).abs() < 1e-6);

        let (w, d) = minimize_alpha(&example_3x3());
        assert_eq!((w.row, w.col), (1.0, 0.0));
        assert!((d - 0.850).abs() < 1e-12);
        let (ga, gd) = grid_min(&example_3x3(), 1e-4);
        assert!((ga - 1.0).abs() < 1e-9 && (gd - 0.850).abs() < 1e-9);

        let r = vec![vec![0.1, 0.6], vec![0.3, 0.2]];
        let g = BimatrixGame::from_rows(&r, &r).unwrap();
        let (w, d) = minimize_alpha(&g);
        assert_eq!(w.row, 0.5);
        assert_eq!(d, 0.6);
    }

    #[test]
    fn minimize_alpha_flat_interior_segment() {
        // Lines: 1 - α (cell 0), α (cell 1), constant 0.7 (cell 2).
        // δ is flat at 0.7 on [0.3, 0.7].
        let g = BimatrixGame::from_rows(&[vec![0.0, 1.0, 0.7]], &[vec![1.0, 0.0, 0.7]]).unwrap();
        let (w, d) = minimize_alpha(&g);
        assert!((w.row - 0.5).abs() < 1e-12);
        assert!((d - 0.7).abs() < 1e-12);
    }

    #[test]
    fn minimize_alpha_matches_grid_on_random_games() {
        for seed in 0..100 {
            let g = random_game(10, 10, seed).unwrap();
            let (_, d) = minimize_alpha(&g);
            let (_, gd) = grid_min(&g, 1e-5);
            assert!(d <= gd + 1e-12, "seed {seed}");
            assert!((d - gd).abs() < 1e-4, "seed {seed}: {d} vs {gd}");
        }
    }

    #[test]
    fn example_solutions() {
        for method in [MmrMethod::Simplex, MmrMethod::Specialized] {
            let opts = MmrOptions {
                method,
                ..MmrOptions::default()
            };
            let s = solve_mmr_with(&example_2x2(), &opts).unwrap();
            assert_eq!(s.x_star, vec![1.0, 0.0]);
            assert_eq!(s.y_star, vec![1.0, 0.0]);
            assert_eq!((s.payoffs.row, s.payoffs.col), (5.0, 3.0));
            assert!((s.lambda_star - 3.0).abs() < 1e-12);

            let s = solve_mmr_with(&example_3x3(), &opts).unwrap();
            assert_eq!(s.x_star, vec![0.0, 0.0, 1.0], "{method:?}");
            assert_eq!(s.y_star, vec![0.0, 1.0, 0.0]);
            assert!((s.payoffs.row - 0.850).abs() < 1e-9);
            assert!((s.payoffs.col - 0.904).abs() < 1e-9);
        }
    }

    #[test]
    fn recover_alpha_examples() {
        let w = recover_alpha_tight(&example_2x2(), 3.0).unwrap();
        assert_eq!((w.row, w.col), (0.0, 1.0));
        let w = recover_alpha_tight(&example_3x3(), 0.850).unwrap();
        assert!((w.row - 1.0).abs() < 1e-12);

        let r = vec![vec![0.4, 0.4], vec![0.4, 0.4]];
        let g = BimatrixGame::from_rows(&r, &r).unwrap();
        assert_eq!(recover_alpha_tight(&g, 0.4).unwrap().row, 0.5);

        assert!(matches!(
            recover_alpha_tight(&example_2x2(), 1.0),
            Err(MmrError::NoConsistentPair(_))
        ));
    }

    #[test]
    fn recover_alpha_agrees_in_value() {
        for seed in 0..50 {
            let g = random_game(6, 7, seed).unwrap();
            let (w, d) = minimize_alpha(&g);
            let t = recover_alpha_tight(&g, d).unwrap();
            assert!((delta_at(&g, t.row) - delta_at(&g, w.row)).abs() < 1e-8);
        }
    }

    #[test]
    fn specialized_matches_simplex_lambda() {
        for seed in 0..40 {
            let n = 2 + (seed as usize % 49);
            let g = random_game(n, 51 - n, seed).unwrap();
            let simplex = solve_mmr_with(
                &g,
                &MmrOptions {
                    method: MmrMethod::Simplex,
                    ..MmrOptions::default()
                },
            )
            .unwrap();
            let special = solve_mmr_with(
                &g,
                &MmrOptions {
                    method: MmrMethod::Specialized,
                    ..MmrOptions::default()
                },
            )
            .unwrap();
            assert!(
                (simplex.lambda_star - special.lambda_star).abs() <= 1e-12,
                "seed {seed}: {} vs {}",
                simplex.lambda_star,
                special.lambda_star
            );
        }
    }

    #[test]
    fn invariants_on_random_games() {
        for seed in 0..60 {
            let n = 1 + (seed as usize * 7) % 12;
            let m = 1 + (seed as usize * 5) % 12;
            let g = random_game(n, m, seed).unwrap();
            let s = solve_mmr(&g).unwrap();
            let (_, pure_lower) = crate::game::pure_minimax(&g);
            assert!(s.lambda_star >= pure_lower - 1e-12);
            assert!((s.lambda_star - s.joint_payoffs.row.min(s.joint_payoffs.col)).abs() <= 1e-8);
            assert!((s.marginal_mass.0 - 1.0).abs() <= 1e-7);
            for (i, j) in s.support(1e-7) {
                let v = s.alpha_star.row * g.row_matrix()[(i, j)]
                    + s.alpha_star.col * g.col_matrix()[(i, j)];
                assert!(v >= s.delta_star - 1e-7);
            }
            for i in 0..n {
                for j in 0..m {
                    let p = MixedProfile::pure(n, m, i, j);
                    let v = s.alpha_star.apply(g.payoff(&p).unwrap());
                    assert!(v <= s.delta_star + 1e-8);
                }
            }
        }
    }
}
