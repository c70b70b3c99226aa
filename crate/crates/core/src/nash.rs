//! Nash equilibria: Lemke-Howson, support enumeration and verification.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{normalize, BimatrixGame, GameError, MixedProfile, PayoffPair};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LhError {
    #[error("unresolved ratio-test tie at pivot {pivot}; the game is degenerate")]
    Degenerate { pivot: usize },
    #[error("pivot limit {0} exceeded")]
    PivotLimit(usize),
    #[error("time budget exhausted after {pivots} pivots")]
    Timeout { pivots: usize },
    #[error("game is {n}x{m}; this method accepts at most {limit}x{limit}")]
    SizeGuard { n: usize, m: usize, limit: usize },
    #[error("dropped label {label} outside 1..={max}")]
    InvalidLabel { label: usize, max: usize },
    #[error("pivoting ended at a profile with regret {0:e}")]
    NotVerified(f64),
    #[error("perturbation magnitude must be positive, got {0}")]
    InvalidMagnitude(f64),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    /// Path from the artificial equilibrium dropping this label.
    DroppedLabel(usize),
    /// Path from equilibrium `from` of the same enumeration dropping `label`.
    Path { from: usize, label: usize },
    Support { rows: Vec<usize>, cols: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashEquilibrium {
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub payoffs: PayoffPair,
    pub origin: Origin,
    /// Largest gain from a unilateral pure deviation at this profile.
    pub verified_eps: f64,
    pub pivots: Option<usize>,
}

impl NashEquilibrium {
    pub fn profile(&self) -> MixedProfile {
        MixedProfile {
            x: self.x_star.clone(),
            y: self.y_star.clone(),
        }
    }

    fn from_profile(g: &BimatrixGame, x: Vec<f64>, y: Vec<f64>, origin: Origin) -> Self {
        let payoffs = g.payoff_unchecked(&x, &y);
        let verified_eps = regret(g, &x, &y);
        NashEquilibrium {
            x_star: x,
            y_star: y,
            payoffs,
            origin,
            verified_eps,
            pivots: None,
        }
    }
}

/// `max(max_i (Ry)_i - xᵀRy, max_j (xᵀC)_j - xᵀCy, 0)`.
pub fn regret(g: &BimatrixGame, x: &[f64], y: &[f64]) -> f64 {
    let ry = g.row_matrix().mul_vec(y);
    let xc = g.col_matrix().vec_mul(x);
    let pay = g.payoff_unchecked(x, y);
    let best_row = ry.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best_col = xc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (best_row - pay.row).max(best_col - pay.col).max(0.0)
}

/// ε-Nash test. Pure deviations suffice because payoffs are bilinear.
pub fn is_nash(g: &BimatrixGame, p: &MixedProfile, eps: f64) -> Result<bool, LhError> {
    g.check_profile(p)?;
    let ry = g.row_matrix().mul_vec(&p.y);
    let xc = g.col_matrix().vec_mul(&p.x);
    let pay = g.payoff_unchecked(&p.x, &p.y);
    Ok(ry.iter().all(|v| *v <= pay.row + eps) && xc.iter().all(|v| *v <= pay.col + eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arithmetic {
    Float,
    /// Exact `BigRational` pivoting; games up to 10×10.
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhOptions {
    pub arithmetic: Arithmetic,
    pub max_pivots: usize,
    pub deadline: Option<Instant>,
    /// ε passed to [`is_nash`] on the final profile.
    pub verify_eps: f64,
    /// Relative tolerance for ratio-test ties in float mode.
    pub tie_tol: f64,
}

impl Default for LhOptions {
    fn default() -> Self {
        LhOptions {
            arithmetic: Arithmetic::Float,
            max_pivots: 1_000_000,
            deadline: None,
            verify_eps: 1e-7,
            tie_tol: 1e-12,
        }
    }
}

pub const RATIONAL_LIMIT: usize = 10;

pub fn lh_solve(g: &BimatrixGame, dropped_label: usize) -> Result<NashEquilibrium, LhError> {
    lh_solve_with(g, dropped_label, &LhOptions::default())
}

/// Runs Lemke-Howson from the artificial equilibrium, dropping
/// `dropped_label` (1-based; labels `1..=n` are row actions, `n+1..=n+m`
/// column actions).
pub fn lh_solve_with(
    g: &BimatrixGame,
    dropped_label: usize,
    opts: &LhOptions,
) -> Result<NashEquilibrium, LhError> {
    let (n, m) = (g.n(), g.m());
    if dropped_label == 0 || dropped_label > n + m {
        return Err(LhError::InvalidLabel {
            label: dropped_label,
            max: n + m,
        });
    }
    let (x, y, pivots) = match opts.arithmetic {
        Arithmetic::Float => run_lh::<f64>(g, dropped_label, opts)?,
        Arithmetic::Rational => {
            if n > RATIONAL_LIMIT || m > RATIONAL_LIMIT {
                return Err(LhError::SizeGuard {
                    n,
                    m,
                    limit: RATIONAL_LIMIT,
                });
            }
            run_lh::<BigRational>(g, dropped_label, opts)?
        }
    };
    let mut eq = NashEquilibrium::from_profile(g, x, y, Origin::DroppedLabel(dropped_label));
    eq.pivots = Some(pivots);
    if eq.verified_eps > opts.verify_eps {
        return Err(LhError::NotVerified(eq.verified_eps));
    }
    Ok(eq)
}

/// Field operations needed by the pivoting code.
trait Scalar: Clone {
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    /// Ordering with a tie band of `tol` (relative) in float mode.
    fn cmp_tol(&self, o: &Self, tol: f64) -> Ordering;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 1e-12
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn cmp_tol(&self, o: &Self, tol: f64) -> Ordering {
        if (self - o).abs() <= tol * (1.0 + self.abs().max(o.abs())) {
            Ordering::Equal
        } else {
            self.total_cmp(o)
        }
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite payoff")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn zero() -> Self {
        BigRational::from_integer(BigInt::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn cmp_tol(&self, o: &Self, _tol: f64) -> Ordering {
        self.cmp(o)
    }
}

/// One of the two best-response polytopes in tableau form.
///
/// Columns are indexed by label `0..n+m` (zero-based), the last column is the
/// right-hand side. `basis[r]` is the label basic in row `r`. `identity` lists
/// the labels whose columns started as the identity; they carry `B⁻¹` and
/// serve as lexicographic tie-breakers.
#[derive(Clone)]
struct Tableau<T> {
    rows: usize,
    width: usize,
    data: Vec<T>,
    basis: Vec<usize>,
    identity: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    #[inline]
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.width + c]
    }

    /// Lexicographic minimum-ratio row for entering column `col`.
    fn leaving_row(&self, col: usize, tie_tol: f64) -> Option<Result<usize, ()>> {
        let rhs = self.width - 1;
        let mut tied: Vec<usize> = (0..self.rows).filter(|&r| self.at(r, col).is_positive()).collect();
        if tied.is_empty() {
            return None;
        }
        let keys = std::iter::once(rhs).chain(self.identity.iter().copied());
        for key_col in keys {
            if tied.len() == 1 {
                break;
            }
            let ratio = |r: usize| self.at(r, key_col).div(self.at(r, col));
            let best = tied
                .iter()
                .map(|&r| ratio(r))
                .reduce(|a, b| if b.cmp_tol(&a, 0.0) == Ordering::Less { b } else { a })
                .unwrap();
            tied.retain(|&r| ratio(r).cmp_tol(&best, tie_tol) != Ordering::Greater);
        }
        Some(if tied.len() == 1 { Ok(tied[0]) } else { Err(()) })
    }

    fn pivot(&mut self, row: usize, col: usize) -> usize {
        let w = self.width;
        let p = self.at(row, col).clone();
        for c in 0..w {
            let v = self.data[row * w + c].div(&p);
            self.data[row * w + c] = v;
        }
        let pivot_row: Vec<T> = self.data[row * w..(row + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let f = self.data[r * w + col].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..w {
                let v = self.data[r * w + c].sub(&f.mul(&pivot_row[c]));
                self.data[r * w + c] = v;
            }
            self.data[r * w + col] = T::zero();
        }
        std::mem::replace(&mut self.basis[row], col)
    }

    fn min_rhs(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.at(r, self.width - 1).to_f64())
            .fold(f64::INFINITY, f64::min)
    }

    fn value_of(&self, label: usize) -> Option<f64> {
        self.basis
            .iter()
            .position(|&b| b == label)
            .map(|r| self.at(r, self.width - 1).to_f64())
    }
}

/// Pair of tableaux for `P = {x ≥ 0 : Bᵀx ≤ 1}` and `Q = {y ≥ 0 : Ay ≤ 1}`
/// over offset-positive payoffs.
#[derive(Clone)]
struct LhState<T> {
    n: usize,
    m: usize,
    tabs: [Tableau<T>; 2],
}

impl<T: Scalar> LhState<T> {
    /// The artificial equilibrium `(0, 0)`.
    fn artificial(g: &BimatrixGame) -> Self {
        let (n, m) = (g.n(), g.m());
        let labels = n + m;
        let width = labels + 1;
        let min_entry = g.row_matrix().min().min(g.col_matrix().min());
        let offset = 1.0 + (-min_entry).max(0.0);
        let a = g.row_matrix();
        let b = g.col_matrix();

        // P: Bᵀx + s = 1, rows indexed by column action j.
        // Labels 0..n are x_i, labels n..n+m are s_j.
        let mut p_data = vec![T::zero(); m * width];
        for j in 0..m {
            for i in 0..n {
                p_data[j * width + i] = T::from_f64(b[(i, j)] + offset);
            }
            p_data[j * width + n + j] = T::from_f64(1.0);
            p_data[j * width + labels] = T::from_f64(1.0);
        }
        // Q: Ay + r = 1, rows indexed by row action i.
        // Labels 0..n are r_i, labels n..n+m are y_j.
        let mut q_data = vec![T::zero(); n * width];
        for i in 0..n {
            q_data[i * width + i] = T::from_f64(1.0);
            for j in 0..m {
                q_data[i * width + n + j] = T::from_f64(a[(i, j)] + offset);
            }
            q_data[i * width + labels] = T::from_f64(1.0);
        }
        LhState {
            n,
            m,
            tabs: [
                Tableau {
                    rows: m,
                    width,
                    data: p_data,
                    basis: (n..labels).collect(),
                    identity: (n..labels).collect(),
                },
                Tableau {
                    rows: n,
                    width,
                    data: q_data,
                    basis: (0..n).collect(),
                    identity: (0..n).collect(),
                },
            ],
        }
    }

    /// Follows the path that drops zero-based label `k` until `k` is picked
    /// up again. Returns the pivot count.
    fn walk(&mut self, k: usize, opts: &LhOptions) -> Result<usize, LhError> {
        let mut side = if self.tabs[0].basis.contains(&k) { 1 } else { 0 };
        let mut entering = k;
        let mut pivots = 0usize;
        loop {
            if pivots >= opts.max_pivots {
                return Err(LhError::PivotLimit(opts.max_pivots));
            }
            if opts.deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(LhError::Timeout { pivots });
            }
            let tab = &mut self.tabs[side];
            let row = match tab.leaving_row(entering, opts.tie_tol) {
                Some(Ok(r)) => r,
                // A tie the lexicographic rule cannot split, or an unbounded
                // ray (impossible with positive payoffs unless degenerate).
                Some(Err(())) | None => return Err(LhError::Degenerate { pivot: pivots }),
            };
            let leaving = tab.pivot(row, entering);
            pivots += 1;
            debug_assert!(tab.min_rhs() >= -1e-10, "pivot {pivots} lost feasibility");
            if leaving == k {
                return Ok(pivots);
            }
            entering = leaving;
            side = 1 - side;
        }
    }

    /// Normalised profile, or `None` at the artificial equilibrium.
    fn profile(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let mut x: Vec<f64> = (0..n).map(|i| self.tabs[0].value_of(i).unwrap_or(0.0)).collect();
        let mut y: Vec<f64> = (0..self.m)
            .map(|j| self.tabs[1].value_of(n + j).unwrap_or(0.0))
            .collect();
        if x.iter().sum::<f64>() <= 0.0 || y.iter().sum::<f64>() <= 0.0 {
            return None;
        }
        normalize(&mut x);
        normalize(&mut y);
        Some((x, y))
    }
}

fn run_lh<T: Scalar>(
    g: &BimatrixGame,
    dropped: usize,
    opts: &LhOptions,
) -> Result<(Vec<f64>, Vec<f64>, usize), LhError> {
    let mut state = LhState::<T>::artificial(g);
    let pivots = state.walk(dropped - 1, opts)?;
    let (x, y) = state
        .profile()
        .ok_or(LhError::Degenerate { pivot: pivots })?;
    Ok((x, y, pivots))
}

/// Result of a label sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LhEnumeration {
    /// Distinct equilibria in order of discovery.
    pub equilibria: Vec<NashEquilibrium>,
    pub timed_out: bool,
    /// Paths that failed: `(start, label, reason)` where `start` is `None`
    /// for the artificial equilibrium.
    pub failures: Vec<(Option<usize>, usize, LhError)>,
    pub elapsed: Duration,
}

/// L∞ distance on `(x, y)` below which two equilibria are the same.
pub const DEDUP_TOL: f64 = 1e-6;

/// Label sweep from the artificial equilibrium, then from every equilibrium
/// found, until no new equilibrium appears or `time_budget` expires.
pub fn lh_enumerate(g: &BimatrixGame, time_budget: Duration) -> LhEnumeration {
    let opts = LhOptions {
        deadline: Some(Instant::now() + time_budget),
        ..LhOptions::default()
    };
    lh_enumerate_with(g, &opts)
}

pub fn lh_enumerate_with(g: &BimatrixGame, opts: &LhOptions) -> LhEnumeration {
    let start = Instant::now();
    let mut out = match opts.arithmetic {
        Arithmetic::Float => enumerate_paths::<f64>(g, opts),
        Arithmetic::Rational if g.n() > RATIONAL_LIMIT || g.m() > RATIONAL_LIMIT => {
            LhEnumeration {
                equilibria: Vec::new(),
                timed_out: false,
                failures: vec![(
                    None,
                    1,
                    LhError::SizeGuard {
                        n: g.n(),
                        m: g.m(),
                        limit: RATIONAL_LIMIT,
                    },
                )],
                elapsed: Duration::ZERO,
            }
        }
        Arithmetic::Rational => enumerate_paths::<BigRational>(g, opts),
    };
    out.elapsed = start.elapsed();
    out
}

fn enumerate_paths<T: Scalar>(g: &BimatrixGame, opts: &LhOptions) -> LhEnumeration {
    let labels = g.n() + g.m();
    let mut out = LhEnumeration {
        equilibria: Vec::new(),
        timed_out: false,
        failures: Vec::new(),
        elapsed: Duration::ZERO,
    };
    let mut found = DistinctSet::default();
    let root = LhState::<T>::artificial(g);
    // Endpoints still to expand, with the index of their equilibrium.
    let mut frontier: Vec<(Option<usize>, LhState<T>)> = vec![(None, root)];
    let mut next = 0;
    while next < frontier.len() {
        let (from, base) = frontier[next].clone();
        next += 1;
        for label in 1..=labels {
            let mut state = base.clone();
            let pivots = match state.walk(label - 1, opts) {
                Ok(p) => p,
                Err(LhError::Timeout { .. }) => {
                    out.timed_out = true;
                    out.equilibria = found.list;
                    return out;
                }
                Err(e) => {
                    out.failures.push((from, label, e));
                    continue;
                }
            };
            let Some((x, y)) = state.profile() else {
                continue;
            };
            let origin = match from {
                None => Origin::DroppedLabel(label),
                Some(e) => Origin::Path { from: e, label },
            };
            let mut eq = NashEquilibrium::from_profile(g, x, y, origin);
            eq.pivots = Some(pivots);
            if eq.verified_eps > opts.verify_eps {
                out.failures.push((from, label, LhError::NotVerified(eq.verified_eps)));
                continue;
            }
            if found.insert(eq) {
                frontier.push((Some(found.list.len() - 1), state));
            }
        }
    }
    out.equilibria = found.list;
    out
}

/// Equilibria that are pairwise more than `DEDUP_TOL` apart, indexed by the
/// weighted sum `Σ (i+1)·x_i + Σ (j+1)·y_j` so a lookup only scans entries
/// whose sums could be within tolerance.
#[derive(Default)]
struct DistinctSet {
    list: Vec<NashEquilibrium>,
    /// `(weighted sum, index into list)`, sorted by sum.
    keys: Vec<(f64, usize)>,
}

fn weighted_sum(x: &[f64], y: &[f64]) -> f64 {
    let w = |v: &[f64]| v.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum::<f64>();
    w(x) + w(y)
}

fn linf(a: &NashEquilibrium, b: &NashEquilibrium) -> f64 {
    a.x_star
        .iter()
        .zip(&b.x_star)
        .chain(a.y_star.iter().zip(&b.y_star))
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

impl DistinctSet {
    /// Adds `eq` unless an equal profile is already present.
    fn insert(&mut self, eq: NashEquilibrium) -> bool {
        let (n, m) = (eq.x_star.len() as f64, eq.y_star.len() as f64);
        let reach = DEDUP_TOL * (n * (n + 1.0) + m * (m + 1.0)) / 2.0 * (1.0 + 1e-9) + 1e-12;
        let key = weighted_sum(&eq.x_star, &eq.y_star);
        let lo = self.keys.partition_point(|e| e.0 < key - reach);
        let dup = self.keys[lo..]
            .iter()
            .take_while(|e| e.0 <= key + reach)
            .any(|&(_, i)| linf(&self.list[i], &eq) <= DEDUP_TOL);
        if dup {
            return false;
        }
        let at = self.keys.partition_point(|e| e.0 < key);
        self.keys.insert(at, (key, self.list.len()));
        self.list.push(eq);
        true
    }
}

pub const SUPPORT_ENUM_LIMIT: usize = 6;

/// All equilibria with equal-size supports. Complete for nondegenerate games.
pub fn support_enumeration(g: &BimatrixGame) -> Result<Vec<NashEquilibrium>, LhError> {
    const TOL: f64 = 1e-9;
    let (n, m) = (g.n(), g.m());
    if n > SUPPORT_ENUM_LIMIT || m > SUPPORT_ENUM_LIMIT {
        return Err(LhError::SizeGuard {
            n,
            m,
            limit: SUPPORT_ENUM_LIMIT,
        });
    }
    let r = g.row_matrix();
    let c = g.col_matrix();
    let mut found = DistinctSet::default();
    for k in 1..=n.min(m) {
        for rows in subsets(n, k) {
            for cols in subsets(m, k) {
                // Column mix y over `cols` making every row in `rows` indifferent.
                let Some((y_s, v)) = indifference(k, |a, b| r[(rows[a], cols[b])]) else {
                    continue;
                };
                let Some((x_s, u)) = indifference(k, |a, b| c[(rows[b], cols[a])]) else {
                    continue;
                };
                if y_s.iter().chain(&x_s).any(|p| *p < -TOL) {
                    continue;
                }
                let mut x = vec![0.0; n];
                let mut y = vec![0.0; m];
                rows.iter().zip(&x_s).for_each(|(&i, &p)| x[i] = p.max(0.0));
                cols.iter().zip(&y_s).for_each(|(&j, &p)| y[j] = p.max(0.0));
                if r.mul_vec(&y).iter().any(|v_i| *v_i > v + TOL)
                    || c.vec_mul(&x).iter().any(|u_j| *u_j > u + TOL)
                {
                    continue;
                }
                normalize(&mut x);
                normalize(&mut y);
                let eq = NashEquilibrium::from_profile(
                    g,
                    x,
                    y,
                    Origin::Support {
                        rows: rows.clone(),
                        cols: cols.clone(),
                    },
                );
                found.insert(eq);
            }
        }
    }
    Ok(found.list)
}

/// Solves `Σ_b coef(a, b)·w_b = v` for all `a`, `Σ w = 1`.
fn indifference(k: usize, coef: impl Fn(usize, usize) -> f64) -> Option<(Vec<f64>, f64)> {
    let a = Matrix::from_fn(k + 1, k + 1, |i, j| match (i < k, j < k) {
        (true, true) => coef(i, j),
        (true, false) => -1.0,
        (false, true) => 1.0,
        (false, false) => 0.0,
    });
    let mut rhs = vec![0.0; k + 1];
    rhs[k] = 1.0;
    let mut sol = linalg::solve(a, rhs, 1e-12)?;
    let v = sol.pop()?;
    Some((sol, v))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Adds i.i.d. uniform `[0, magnitude)` noise to every entry of both matrices.
pub fn perturb_game(g: &BimatrixGame, magnitude: f64, seed: u64) -> Result<BimatrixGame, LhError> {
    if !(magnitude > 0.0 && magnitude.is_finite()) {
        return Err(LhError::InvalidMagnitude(magnitude));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (g.n(), g.m());
    let r = Matrix::from_fn(n, m, |i, j| g.row_matrix()[(i, j)] + magnitude * rng.random::<f64>());
    let c = Matrix::from_fn(n, m, |i, j| g.col_matrix()[(i, j)] + magnitude * rng.random::<f64>());
    Ok(BimatrixGame::new(r, c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::random_game;

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

    fn pennies() -> BimatrixGame {
        BimatrixGame::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    fn sorted_payoffs(eqs: &[NashEquilibrium]) -> Vec<(f64, f64)> {
        let mut v: Vec<_> = eqs.iter().map(|e| (e.payoffs.row, e.payoffs.col)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    }

    #[test]
    fn lh_on_example_2x2_every_label() {
        let g = example_2x2();
        for label in 1..=4 {
            let eq = lh_solve(&g, label).unwrap();
            assert_eq!(eq.x_star, vec![1.0, 0.0]);
            assert_eq!(eq.y_star, vec![1.0, 0.0]);
            assert_eq!((eq.payoffs.row, eq.payoffs.col), (5.0, 3.0));
        }
        assert_eq!(lh_enumerate(&g, Duration::from_secs(5)).equilibria.len(), 1);
    }

    #[test]
    fn lh_finds_pure_equilibrium_of_example_3x3() {
        let g = example_3x3();
        let hit = (1..=6)
            .filter_map(|l| lh_solve(&g, l).ok())
            .any(|e| e.x_star == vec![0.0, 1.0, 0.0] && e.y_star == vec![0.0, 0.0, 1.0]);
        assert!(hit);
    }

    #[test]
    fn lh_enumerate_example_3x3() {
        let res = lh_enumerate(&example_3x3(), Duration::from_secs(5));
        assert!(!res.timed_out);
        let got = sorted_payoffs(&res.equilibria);
        let want = [(0.482, 0.642), (0.716, 0.738), (0.806, 0.946)];
        assert_eq!(got.len(), 3, "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g.0 - w.0).abs() <= 2e-3 && (g.1 - w.1).abs() <= 2e-3, "{g:?} vs {w:?}");
        }
    }

    #[test]
    fn dominant_strategies() {
        let g = BimatrixGame::from_rows(
            &[vec![0.9, 0.8, 0.7], vec![0.5, 0.4, 0.3], vec![0.2, 0.1, 0.0]],
            &[vec![0.9, 0.5, 0.2], vec![0.8, 0.4, 0.1], vec![0.7, 0.3, 0.0]],
        )
        .unwrap();
        for label in 1..=6 {
            let eq = lh_solve(&g, label).unwrap();
            assert_eq!(eq.x_star, vec![1.0, 0.0, 0.0]);
            assert_eq!(eq.y_star, vec![1.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn matching_pennies() {
        let res = lh_enumerate(&pennies(), Duration::from_secs(5));
        assert_eq!(res.equilibria.len(), 1);
        let e = &res.equilibria[0];
        assert!((e.x_star[0] - 0.5).abs() < 1e-12 && (e.y_star[0] - 0.5).abs() < 1e-12);

        let se = support_enumeration(&pennies()).unwrap();
        assert_eq!(se.len(), 1);
        assert_eq!(se[0].x_star, vec![0.5, 0.5]);
        assert_eq!(se[0].y_star, vec![0.5, 0.5]);
    }

    #[test]
    fn support_enumeration_examples() {
        let se = support_enumeration(&example_2x2()).unwrap();
        assert_eq!(se.len(), 1);
        assert_eq!((se[0].x_star.clone(), se[0].y_star.clone()), (vec![1.0, 0.0], vec![1.0, 0.0]));

        let se = support_enumeration(&example_3x3()).unwrap();
        let lh = lh_enumerate(&example_3x3(), Duration::from_secs(5)).equilibria;
        assert_eq!(se.len(), 3);
        for e in &lh {
            assert!(se.iter().any(|s| s.profile().linf_distance(&e.profile()) <= 1e-6));
        }
        let big = random_game(7, 3, 1).unwrap();
        assert!(matches!(support_enumeration(&big), Err(LhError::SizeGuard { .. })));
    }

    #[test]
    fn is_nash_examples() {
        let g = example_2x2();
        assert!(is_nash(&g, &MixedProfile::pure(2, 2, 0, 0), 0.0).unwrap());
        assert!(!is_nash(&g, &MixedProfile::pure(2, 2, 1, 1), 0.0).unwrap());
        assert!(is_nash(&g, &MixedProfile::pure(3, 2, 0, 0), 0.0).is_err());
        for eq in support_enumeration(&example_3x3()).unwrap() {
            assert!(is_nash(&example_3x3(), &eq.profile(), 1e-7).unwrap());
        }
    }

    #[test]
    fn rational_mode_agrees_with_float() {
        for seed in 0..20 {
            let g = random_game(4, 5, seed).unwrap();
            for label in 1..=9 {
                let f = lh_solve(&g, label).unwrap();
                let r = lh_solve_with(
                    &g,
                    label,
                    &LhOptions {
                        arithmetic: Arithmetic::Rational,
                        ..LhOptions::default()
                    },
                )
                .unwrap();
                assert!(f.profile().linf_distance(&r.profile()) < 1e-9);
            }
        }
        let big = random_game(11, 2, 0).unwrap();
        let err = lh_solve_with(
            &big,
            1,
            &LhOptions {
                arithmetic: Arithmetic::Rational,
                ..LhOptions::default()
            },
        );
        assert!(matches!(err, Err(LhError::SizeGuard { .. })));
    }

    #[test]
    fn invalid_label() {
        assert!(matches!(lh_solve(&example_2x2(), 0), Err(LhError::InvalidLabel { .. })));
        assert!(matches!(lh_solve(&example_2x2(), 5), Err(LhError::InvalidLabel { .. })));
    }

    #[test]
    fn perturbation_contract() {
        let g = BimatrixGame::from_rows(&vec![vec![0.5; 3]; 3], &vec![vec![0.5; 3]; 3]).unwrap();
        assert!(matches!(perturb_game(&g, 0.0, 1), Err(LhError::InvalidMagnitude(_))));
        let before = lh_solve(&g, 1);
        assert!(matches!(before, Ok(_) | Err(LhError::Degenerate { .. })));
        let p = perturb_game(&g, 1e-9, 3).unwrap();
        assert_eq!(p, perturb_game(&g, 1e-9, 3).unwrap());
        assert!(p.row_matrix().as_slice().iter().all(|v| (0.5..=0.5 + 1e-9).contains(v)));
        for label in 1..=6 {
            assert!(lh_solve(&p, label).is_ok());
        }
        let normalized = random_game(4, 4, 5).unwrap();
        let p = perturb_game(&normalized, 1e-3, 9).unwrap();
        assert!(p.row_matrix().as_slice().iter().all(|v| (0.0..=1.0 + 1e-3).contains(v)));
    }

    #[test]
    fn offset_invariance() {
        for seed in 0..20 {
            let g = random_game(5, 4, seed).unwrap();
            let shifted = g.map(|v| v + 3.0, |v| v + 3.0).unwrap();
            for label in 1..=9 {
                let a = lh_solve(&g, label).unwrap();
                let b = lh_solve(&shifted, label).unwrap();
                assert!(a.profile().linf_distance(&b.profile()) <= 1e-9);
            }
        }
    }

    #[test]
    fn timeout_is_reported() {
        let g = random_game(40, 40, 3).unwrap();
        let res = lh_enumerate(&g, Duration::ZERO);
        assert!(res.timed_out);
        assert!(res.equilibria.is_empty());
    }

    #[test]
    fn negative_payoffs_are_offset() {
        let g = example_2x2().map(|v| v - 10.0, |v| v - 10.0).unwrap();
        let eq = lh_solve(&g, 2).unwrap();
        assert_eq!(eq.x_star, vec![1.0, 0.0]);
        assert_eq!((eq.payoffs.row, eq.payoffs.col), (-5.0, -7.0));
    }
}
