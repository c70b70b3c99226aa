//! Dense two-phase simplex.
//!
//! Problems are stated in a general form ([`LpProblem`]) and converted to
//! `min cᵀx, Ax = b, x ≥ 0` by [`to_standard_form`]. The solver keeps a full
//! tableau `[A | B⁻¹ | b]` where the `B⁻¹` block starts as the identity over
//! one artificial column per row. That block doubles as the tie-breaker for
//! the lexicographic ratio test and as the source of the dual vector.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dot, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// A linear program in general form.
///
/// Each variable has an optional lower and upper bound; `lower = None` means
/// unbounded below. Fresh variables default to `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Matrix,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            constraints: Matrix::zeros(0, n),
            relations: Vec::new(),
            rhs: Vec::new(),
            lower: vec![Some(0.0); n],
            upper: vec![None; n],
        }
    }

    /// Appends the row `coeffs · x (rel) rhs`.
    pub fn constraint(mut self, coeffs: &[f64], rel: Relation, rhs: f64) -> Self {
        self.push_constraint(coeffs, rel, rhs);
        self
    }

    pub fn push_constraint(&mut self, coeffs: &[f64], rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        let mut rows = self.constraints.as_slice().to_vec();
        rows.extend_from_slice(coeffs);
        self.constraints =
            Matrix::from_vec(self.relations.len() + 1, self.num_vars(), rows).unwrap();
        self.relations.push(rel);
        self.rhs.push(rhs);
    }

    pub fn bounds(mut self, var: usize, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn free(self, var: usize) -> Self {
        self.bounds(var, None, None)
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.relations.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let m = self.num_rows();
        let bad = |what: &str| Err(LpError::InvalidProblem(what.to_string()));
        if self.constraints.rows() != m || self.constraints.cols() != n {
            return bad("constraint matrix shape does not match rows/variables");
        }
        if self.rhs.len() != m {
            return bad("rhs length differs from row count");
        }
        if self.lower.len() != n || self.upper.len() != n {
            return bad("bound vectors differ from variable count");
        }
        let finite = |v: &f64| v.is_finite();
        if !self.objective.iter().all(finite)
            || !self.constraints.as_slice().iter().all(finite)
            || !self.rhs.iter().all(finite)
            || !self.lower.iter().flatten().all(finite)
            || !self.upper.iter().flatten().all(finite)
        {
            return bad("non-finite data");
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if let (Some(l), Some(u)) = (l, u) {
                if l > u {
                    return bad("lower bound exceeds upper bound");
                }
            }
        }
        Ok(())
    }

    /// Objective value of `x` in the problem's own sense.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }
}

/// How an original variable is expressed through standard-form columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarMap {
    /// `x = offset + s[col]`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - s[col]`
    Reflected { col: usize, offset: f64 },
    /// `x = s[pos] - s[neg]`
    Split { pos: usize, neg: usize },
}

/// Standard-form LP plus the map back to the original variables.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    /// `min cᵀs, As = b, s ≥ 0`.
    pub lp: LpProblem,
    pub vars: Vec<VarMap>,
    /// Original objective = `objective_sign · cᵀs + objective_constant`.
    pub objective_sign: f64,
    pub objective_constant: f64,
    /// Rows of `lp` that correspond one-to-one to the original rows; any
    /// further rows encode upper bounds.
    pub original_rows: usize,
}

impl StandardForm {
    pub fn recover(&self, s: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| match *v {
                VarMap::Shifted { col, offset } => offset + s[col],
                VarMap::Reflected { col, offset } => offset - s[col],
                VarMap::Split { pos, neg } => s[pos] - s[neg],
            })
            .collect()
    }
}

/// Rewrites `p` as an equality-constrained minimisation over nonnegative
/// variables, adding a slack (`≤`) or surplus (`≥`) column per inequality.
pub fn to_standard_form(p: &LpProblem) -> Result<StandardForm, LpError> {
    p.validate()?;
    let sign = match p.sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };

    let mut vars = Vec::with_capacity(p.num_vars());
    let mut cost = Vec::new();
    // (column, coefficient multiplier) for each original variable.
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(p.num_vars());
    let mut constant = 0.0;
    let mut offsets = vec![0.0; p.num_vars()];
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..p.num_vars() {
        let c = sign * p.objective[j];
        match (p.lower[j], p.upper[j]) {
            (Some(l), u) => {
                let col = cost.len();
                cost.push(c);
                vars.push(VarMap::Shifted { col, offset: l });
                cols.push(vec![(col, 1.0)]);
                offsets[j] = l;
                constant += p.objective[j] * l;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
            }
            (None, Some(u)) => {
                let col = cost.len();
                cost.push(-c);
                vars.push(VarMap::Reflected { col, offset: u });
                cols.push(vec![(col, -1.0)]);
                offsets[j] = u;
                constant += p.objective[j] * u;
            }
            (None, None) => {
                let pos = cost.len();
                cost.push(c);
                cost.push(-c);
                vars.push(VarMap::Split { pos, neg: pos + 1 });
                cols.push(vec![(pos, 1.0), (pos + 1, -1.0)]);
            }
        }
    }
    let structural = cost.len();
    let slack_count = p.relations.iter().filter(|r| **r != Relation::Eq).count();
    let total = structural + slack_count + bound_rows.len();
    let rows = p.num_rows() + bound_rows.len();

    let mut a = Matrix::zeros(rows, total);
    let mut b = Vec::with_capacity(rows);
    let mut next_slack = structural;
    for i in 0..p.num_rows() {
        let row = p.constraints.row(i);
        let mut rhs = p.rhs[i];
        for (j, &coef) in row.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            rhs -= coef * offsets[j];
            for &(col, mult) in &cols[j] {
                a[(i, col)] += coef * mult;
            }
        }
        match p.relations[i] {
            Relation::Le => {
                a[(i, next_slack)] = 1.0;
                next_slack += 1;
            }
            Relation::Ge => {
                a[(i, next_slack)] = -1.0;
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        b.push(rhs);
    }
    for (k, &(col, width)) in bound_rows.iter().enumerate() {
        let i = p.num_rows() + k;
        a[(i, col)] = 1.0;
        a[(i, next_slack)] = 1.0;
        next_slack += 1;
        b.push(width);
    }
    cost.resize(total, 0.0);

    let lp = LpProblem {
        sense: Sense::Min,
        objective: cost,
        constraints: a,
        relations: vec![Relation::Eq; rows],
        rhs: b,
        lower: vec![Some(0.0); total],
        upper: vec![None; total],
    };
    Ok(StandardForm {
        lp,
        vars,
        objective_sign: sign,
        objective_constant: constant,
        original_rows: p.num_rows(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotRule {
    /// Dantzig pricing with a lexicographic ratio test; switches to Bland's
    /// rule after a long run of degenerate pivots.
    Lexicographic,
    /// Smallest-index entering and leaving variables throughout.
    Bland,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub rule: PivotRule,
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Pivot budget across both phases; `None` means `50·(M + N)` on the
    /// standard form.
    pub max_pivots: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            rule: PivotRule::Lexicographic,
            pivot_tol: 1e-10,
            feasibility_tol: 1e-8,
            optimality_tol: 1e-9,
            max_pivots: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Scaled residual norms of an optimal certificate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖As − b‖∞ / (1 + ‖b‖∞)` on the standard form.
    pub primal: f64,
    /// `max_j max(0, −(c − Aᵀy)_j) / (1 + ‖c‖∞)`.
    pub dual: f64,
    /// `|cᵀs − bᵀy| / (1 + |cᵀs|)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of the original variables.
    pub x: Vec<f64>,
    /// Multipliers of the original rows, in the problem's own sense:
    /// `c = Aᵀy + d` with `d` the reduced costs.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    /// Standard-form column indices of the final basis; `None` marks a row
    /// whose artificial variable stayed basic (a redundant row).
    pub basis: Vec<Option<usize>>,
    pub residuals: Residuals,
    pub pivots: usize,
    /// For `Infeasible`: `y` with `yᵀA ≤ 0` and `yᵀb > 0` on the standard
    /// form rows.
    pub farkas: Option<Vec<f64>>,
    /// For `Unbounded`: an improving direction over the original variables.
    pub ray: Option<Vec<f64>>,
    pub standard: StandardForm,
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    solve_lp_with(p, &LpOptions::default())
}

pub fn solve_lp_with(p: &LpProblem, opts: &LpOptions) -> Result<LpSolution, LpError> {
    let sf = to_standard_form(p)?;
    let outcome = Tableau::run(&sf.lp, opts)?;

    let orig_n = p.num_vars();
    let x = sf.recover(&outcome.primal);
    let std = &sf.lp;
    let y = &outcome.dual;

    let red_std: Vec<f64> = (0..std.num_vars())
        .map(|j| {
            let col: f64 = (0..std.num_rows()).map(|i| std.constraints[(i, j)] * y[i]).sum();
            std.objective[j] - col
        })
        .collect();
    let sign = sf.objective_sign;
    let reduced_costs = (0..orig_n)
        .map(|j| match sf.vars[j] {
            VarMap::Shifted { col, .. } => sign * red_std[col],
            VarMap::Reflected { col, .. } => -sign * red_std[col],
            VarMap::Split { pos, .. } => sign * red_std[pos],
        })
        .collect();
    let duals: Vec<f64> = y[..sf.original_rows].iter().map(|v| sign * v).collect();

    let primal_std = dot(&std.objective, &outcome.primal);
    let dual_std = dot(&std.rhs, y);
    let objective = sign * primal_std + sf.objective_constant;
    let dual_objective = sign * dual_std + sf.objective_constant;

    let residuals = if outcome.status == LpStatus::Optimal {
        let b_norm = std.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let c_norm = std.objective.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let ax = std.constraints.mul_vec(&outcome.primal);
        let primal = ax
            .iter()
            .zip(&std.rhs)
            .fold(0.0f64, |a, (l, r)| a.max((l - r).abs()))
            / (1.0 + b_norm);
        let dual = red_std.iter().fold(0.0f64, |a, d| a.max(-d)) / (1.0 + c_norm);
        let gap = (primal_std - dual_std).abs() / (1.0 + primal_std.abs());
        Residuals { primal, dual, gap }
    } else {
        Residuals::default()
    };

    let ray = outcome.ray.map(|dir| {
        sf.vars
            .iter()
            .map(|v| match *v {
                VarMap::Shifted { col, .. } => dir[col],
                VarMap::Reflected { col, .. } => -dir[col],
                VarMap::Split { pos, neg } => dir[pos] - dir[neg],
            })
            .collect()
    });

    Ok(LpSolution {
        status: outcome.status,
        x,
        duals,
        reduced_costs,
        objective,
        dual_objective,
        basis: outcome.basis,
        residuals,
        pivots: outcome.pivots,
        farkas: outcome.farkas,
        ray,
        standard: sf,
    })
}

struct Outcome {
    status: LpStatus,
    primal: Vec<f64>,
    dual: Vec<f64>,
    basis: Vec<Option<usize>>,
    pivots: usize,
    farkas: Option<Vec<f64>>,
    ray: Option<Vec<f64>>,
}

/// Working tableau over `min cᵀs, As = b, s ≥ 0`.
///
/// Layout per row: `N` structural columns, `M` artificial columns (holding
/// `B⁻¹` of the sign-normalised rows), then the right-hand side.
struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced-cost row, same layout; last entry is minus the objective.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// `±1` applied to each row so that `b ≥ 0` initially.
    row_sign: Vec<f64>,
    /// Rows kept after removing all-zero rows.
    active_rows: Vec<usize>,
    pivots: usize,
    budget: usize,
    degenerate_streak: usize,
    use_bland: bool,
}

enum Step {
    Optimal,
    Unbounded(usize),
    Pivoted,
    Budget,
}

impl Tableau {
    fn run(lp: &LpProblem, opts: &LpOptions) -> Result<Outcome, LpError> {
        let a = &lp.constraints;
        let n = lp.num_vars();
        let total_rows = lp.num_rows();
        let budget = opts.max_pivots.unwrap_or(50 * (total_rows + n));

        // Presolve: drop all-zero rows.
        let mut active_rows = Vec::with_capacity(total_rows);
        for i in 0..total_rows {
            if a.row(i).iter().all(|v| *v == 0.0) {
                if lp.rhs[i].abs() > opts.feasibility_tol {
                    let mut farkas = vec![0.0; total_rows];
                    farkas[i] = lp.rhs[i].signum();
                    return Ok(Outcome {
                        status: LpStatus::Infeasible,
                        primal: vec![0.0; n],
                        dual: vec![0.0; total_rows],
                        basis: Vec::new(),
                        pivots: 0,
                        farkas: Some(farkas),
                        ray: None,
                    });
                }
            } else {
                active_rows.push(i);
            }
        }

        let m = active_rows.len();
        let width = n + m + 1;
        let mut data = vec![0.0; m * width];
        let mut row_sign = vec![1.0; m];
        for (r, &i) in active_rows.iter().enumerate() {
            let s = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
            row_sign[r] = s;
            let row = &mut data[r * width..(r + 1) * width];
            for (dst, &v) in row[..n].iter_mut().zip(a.row(i)) {
                *dst = s * v;
            }
            row[n + r] = 1.0;
            row[n + m] = s * lp.rhs[i];
        }

        let mut t = Tableau {
            m,
            n,
            width,
            data,
            cost: vec![0.0; width],
            basis: (n..n + m).collect(),
            row_sign,
            active_rows,
            pivots: 0,
            budget,
            degenerate_streak: 0,
            use_bland: opts.rule == PivotRule::Bland,
        };

        // Phase 1: minimise the sum of artificials.
        for r in 0..m {
            for j in 0..n {
                t.cost[j] -= t.data[r * width + j];
            }
            t.cost[width - 1] -= t.data[r * width + width - 1];
        }
        loop {
            match t.step(opts)? {
                Step::Pivoted => continue,
                Step::Optimal => break,
                Step::Budget => return Ok(t.finish(lp, LpStatus::IterationLimit, None, None)),
                Step::Unbounded(_) => {
                    return Err(LpError::NumericalBreakdown(
                        "phase one reported an unbounded direction".into(),
                    ))
                }
            }
        }
        let infeasibility = -t.cost[width - 1];
        let b_norm = lp.rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > opts.feasibility_tol * (1.0 + b_norm) {
            // Phase-one multipliers: w = c_B B⁻¹ with unit costs on artificials.
            let mut w = vec![0.0; total_rows];
            for (r, &i) in t.active_rows.iter().enumerate() {
                w[i] = (1.0 - t.cost[n + r]) * t.row_sign[r];
            }
            return Ok(t.finish(lp, LpStatus::Infeasible, Some(w), None));
        }

        // Drive remaining artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] < n {
                continue;
            }
            let row = &t.data[r * width..r * width + n];
            let pick = (0..n)
                .filter(|&j| row[j].abs() > opts.pivot_tol)
                .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()));
            if let Some(j) = pick {
                t.pivot(r, j);
            }
        }

        // Phase 2 reduced costs from scratch.
        t.cost.iter_mut().for_each(|v| *v = 0.0);
        t.cost[..n].copy_from_slice(&lp.objective);
        for r in 0..m {
            let cb = if t.basis[r] < n { lp.objective[t.basis[r]] } else { 0.0 };
            if cb == 0.0 {
                continue;
            }
            for j in 0..width {
                t.cost[j] -= cb * t.data[r * width + j];
            }
        }
        t.degenerate_streak = 0;
        loop {
            match t.step(opts)? {
                Step::Pivoted => continue,
                Step::Optimal => return Ok(t.finish(lp, LpStatus::Optimal, None, None)),
                Step::Budget => return Ok(t.finish(lp, LpStatus::IterationLimit, None, None)),
                Step::Unbounded(j) => {
                    let mut dir = vec![0.0; n];
                    dir[j] = 1.0;
                    for r in 0..m {
                        if t.basis[r] < n {
                            dir[t.basis[r]] = -t.data[r * width + j];
                        }
                    }
                    return Ok(t.finish(lp, LpStatus::Unbounded, None, Some(dir)));
                }
            }
        }
    }

    fn step(&mut self, opts: &LpOptions) -> Result<Step, LpError> {
        // Artificial columns never re-enter.
        let eligible = self.n;
        let entering = if self.use_bland {
            (0..eligible).find(|&j| self.cost[j] < -opts.optimality_tol && !self.is_basic(j))
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..eligible {
                let d = self.cost[j];
                if d < -opts.optimality_tol && best.is_none_or(|(_, b)| d < b) {
                    best = Some((j, d));
                }
            }
            best.map(|(j, _)| j)
        };
        let Some(col) = entering else {
            return Ok(Step::Optimal);
        };
        if self.pivots >= self.budget {
            return Ok(Step::Budget);
        }

        let rhs = self.width - 1;
        let candidates: Vec<usize> = (0..self.m)
            .filter(|&r| self.at(r, col) > opts.pivot_tol)
            .collect();
        if candidates.is_empty() {
            return Ok(Step::Unbounded(col));
        }
        let ratio = |r: usize| self.at(r, rhs) / self.at(r, col);
        let min_ratio = candidates
            .iter()
            .map(|&r| ratio(r))
            .fold(f64::INFINITY, f64::min);
        let tie_tol = opts.feasibility_tol * 1e-3 * (1.0 + min_ratio.abs());
        let mut tied: Vec<usize> = candidates
            .into_iter()
            .filter(|&r| ratio(r) <= min_ratio + tie_tol)
            .collect();

        let leave = if tied.len() == 1 {
            tied[0]
        } else if self.use_bland {
            *tied.iter().min_by_key(|&&r| self.basis[r]).unwrap()
        } else {
            // Lexicographic minimum of (B⁻¹ row) / pivot over the tied rows.
            for k in 0..self.m {
                if tied.len() == 1 {
                    break;
                }
                let key = |r: usize| self.at(r, self.n + k) / self.at(r, col);
                let best = tied.iter().map(|&r| key(r)).fold(f64::INFINITY, f64::min);
                let tol = opts.pivot_tol * (1.0 + best.abs());
                tied.retain(|&r| key(r) <= best + tol);
            }
            if tied.len() > 1 {
                *tied.iter().min_by_key(|&&r| self.basis[r]).unwrap()
            } else {
                tied[0]
            }
        };

        if self.at(leave, col).abs() <= opts.pivot_tol {
            return Err(LpError::NumericalBreakdown(format!(
                "pivot {:e} below tolerance",
                self.at(leave, col)
            )));
        }
        if ratio(leave) <= opts.feasibility_tol {
            self.degenerate_streak += 1;
            if !self.use_bland && self.degenerate_streak > 10 * (self.m + 10) {
                self.use_bland = true;
            }
        } else {
            self.degenerate_streak = 0;
        }
        self.pivot(leave, col);
        Ok(Step::Pivoted)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn is_basic(&self, j: usize) -> bool {
        self.basis.contains(&j)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.data[row * w + col];
        {
            let pr = &mut self.data[row * w..(row + 1) * w];
            pr.iter_mut().for_each(|v| *v /= p);
            pr[col] = 1.0;
        }
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let f = self.data[r * w + col];
            if f == 0.0 {
                continue;
            }
            let dst = &mut self.data[r * w..(r + 1) * w];
            for (d, &s) in dst.iter_mut().zip(&pivot_row) {
                *d -= f * s;
            }
            dst[col] = 0.0;
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (d, &s) in self.cost.iter_mut().zip(&pivot_row) {
                *d -= f * s;
            }
            self.cost[col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn finish(
        &self,
        lp: &LpProblem,
        status: LpStatus,
        farkas: Option<Vec<f64>>,
        ray: Option<Vec<f64>>,
    ) -> Outcome {
        let n = self.n;
        let mut primal = vec![0.0; n];
        for r in 0..self.m {
            if self.basis[r] < n {
                primal[self.basis[r]] = self.at(r, self.width - 1).max(0.0);
            }
        }
        // Reduced cost of artificial k is -(c_B B⁻¹)_k for the sign-normalised rows.
        let mut dual = vec![0.0; lp.num_rows()];
        for (r, &i) in self.active_rows.iter().enumerate() {
            dual[i] = -self.cost[n + r] * self.row_sign[r];
        }
        let mut basis = vec![None; lp.num_rows()];
        for (r, &i) in self.active_rows.iter().enumerate() {
            basis[i] = (self.basis[r] < n).then_some(self.basis[r]);
        }
        Outcome {
            status,
            primal,
            dual,
            basis,
            pivots: self.pivots,
            farkas,
            ray,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dlp_2x2() -> LpProblem {
        // max λ: 5q11+3q12+3q21+4q22-λ ≥ 0, 3q11+2q12+2q21+q22-λ ≥ 0, Σq = 1.
        LpProblem::new(Sense::Max, vec![0.0, 0.0, 0.0, 0.0, 1.0])
            .constraint(&[5.0, 3.0, 3.0, 4.0, -1.0], Relation::Ge, 0.0)
            .constraint(&[3.0, 2.0, 2.0, 1.0, -1.0], Relation::Ge, 0.0)
            .constraint(&[1.0, 1.0, 1.0, 1.0, 0.0], Relation::Eq, 1.0)
    }

    #[test]
    fn standard_form_single_slack() {
        let p = LpProblem::new(Sense::Max, vec![1.0]).constraint(&[1.0], Relation::Le, 1.0);
        let sf = to_standard_form(&p).unwrap();
        assert_eq!(sf.lp.objective, vec![-1.0, 0.0]);
        assert_eq!(sf.lp.constraints.row(0), &[1.0, 1.0]);
        assert_eq!(sf.lp.rhs, vec![1.0]);
        assert_eq!(sf.objective_sign, -1.0);
    }

    #[test]
    fn standard_form_counts_surplus_columns() {
        let sf = to_standard_form(&dlp_2x2()).unwrap();
        assert_eq!(sf.lp.num_vars(), 7);
        assert_eq!(sf.lp.num_rows(), 3);
        assert_eq!(sf.lp.constraints.row(0), &[5.0, 3.0, 3.0, 4.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn standard_form_is_idempotent() {
        let sf = to_standard_form(&dlp_2x2()).unwrap();
        let again = to_standard_form(&sf.lp).unwrap();
        assert_eq!(again.lp, sf.lp);
        assert!(again
            .vars
            .iter()
            .enumerate()
            .all(|(j, v)| *v == VarMap::Shifted { col: j, offset: 0.0 }));
    }

    #[test]
    fn standard_form_bounds_and_free_vars() {
        let p = LpProblem::new(Sense::Min, vec![1.0, 1.0, 1.0])
            .constraint(&[1.0, 1.0, 1.0], Relation::Ge, 2.0)
            .bounds(0, Some(1.0), Some(3.0))
            .bounds(1, None, Some(4.0))
            .free(2);
        let sf = to_standard_form(&p).unwrap();
        // x0' , x1', x2+, x2-, surplus, bound slack
        assert_eq!(sf.lp.num_vars(), 6);
        assert_eq!(sf.lp.num_rows(), 2);
        assert_eq!(sf.recover(&[0.5, 1.0, 2.0, 0.5, 0.0, 0.0]), vec![1.5, 3.0, 1.5]);
    }

    #[test]
    fn box_problem() {
        let p = LpProblem::new(Sense::Max, vec![1.0]).constraint(&[1.0], Relation::Le, 3.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_dlp_optimum() {
        let s = solve_lp(&dlp_2x2()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-10);
        assert!((s.x[0] - 1.0).abs() < 1e-10, "{:?}", s.x);
        assert!(s.residuals.gap < 1e-12);
    }

    #[test]
    fn infeasible_with_farkas_certificate() {
        let p = LpProblem::new(Sense::Min, vec![1.0]).constraint(&[1.0], Relation::Le, -1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        let y = s.farkas.unwrap();
        let std = &s.standard.lp;
        let yb = dot(&y, &std.rhs);
        assert!(yb > 0.0);
        for j in 0..std.num_vars() {
            let col: f64 = (0..std.num_rows()).map(|i| y[i] * std.constraints[(i, j)]).sum();
            assert!(col <= 1e-12);
        }
    }

    #[test]
    fn zero_row_presolve() {
        let p = LpProblem::new(Sense::Min, vec![1.0, 1.0])
            .constraint(&[0.0, 0.0], Relation::Eq, 0.0)
            .constraint(&[1.0, 1.0], Relation::Ge, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);

        let p = LpProblem::new(Sense::Min, vec![1.0]).constraint(&[0.0], Relation::Eq, 2.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let p = LpProblem::new(Sense::Max, vec![1.0, 1.0]).constraint(&[1.0, -1.0], Relation::Le, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let ray = s.ray.unwrap();
        assert!(dot(&ray, &p.objective) > 0.0);
        assert!(dot(&ray, p.constraints.row(0)) <= 1e-12);
        assert!(ray.iter().all(|v| *v >= -1e-12));
    }

    #[test]
    fn free_variable_goes_negative() {
        let p = LpProblem::new(Sense::Min, vec![1.0])
            .constraint(&[1.0], Relation::Ge, -5.0)
            .free(0);
        let s = solve_lp(&p).unwrap();
        assert!((s.x[0] + 5.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_rows_terminate() {
        // Degenerate: many copies of the same constraint through the optimum.
        let mut p = LpProblem::new(Sense::Max, vec![1.0, 1.0, 1.0]);
        for _ in 0..6 {
            p.push_constraint(&[1.0, 1.0, 0.0], Relation::Le, 1.0);
            p.push_constraint(&[0.0, 1.0, 1.0], Relation::Le, 1.0);
            p.push_constraint(&[1.0, 0.0, 1.0], Relation::Le, 1.0);
        }
        for rule in [PivotRule::Lexicographic, PivotRule::Bland] {
            let opts = LpOptions {
                rule,
                ..LpOptions::default()
            };
            let s = solve_lp_with(&p, &opts).unwrap();
            assert_eq!(s.status, LpStatus::Optimal);
            assert!((s.objective - 1.5).abs() < 1e-10);
        }
    }

    #[test]
    fn iteration_limit_reported() {
        let opts = LpOptions {
            max_pivots: Some(0),
            ..LpOptions::default()
        };
        let s = solve_lp_with(&dlp_2x2(), &opts).unwrap();
        assert_eq!(s.status, LpStatus::IterationLimit);
    }

    #[test]
    fn rejects_malformed() {
        let mut p = dlp_2x2();
        p.rhs.pop();
        assert!(matches!(solve_lp(&p), Err(LpError::InvalidProblem(_))));
        let p = LpProblem::new(Sense::Min, vec![f64::NAN]);
        assert!(matches!(solve_lp(&p), Err(LpError::InvalidProblem(_))));
    }
}
