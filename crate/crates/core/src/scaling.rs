//! Convex scaling `(R, C) → (tR, (1 - t)C)` and the search for a scaling
//! whose MMR payoffs are balanced.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{BimatrixGame, GameError};
use crate::mmr::{solve_mmr_with, MmrError, MmrOptions, MmrSolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("scaling weight {0} is outside [0, 1]")]
    Range(f64),
    #[error("f(0) = {f0:e} and f(1) = {f1:e} do not bracket zero")]
    NoSignChange { f0: f64, f1: f64 },
    #[error("{0} payoff matrix is identically zero")]
    ZeroMatrix(&'static str),
    #[error(transparent)]
    Mmr(#[from] MmrError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `(tR, (1 - t)C)`.
pub fn scaled_game(g: &BimatrixGame, t: f64) -> Result<BimatrixGame, ScalingError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(ScalingError::Range(t));
    }
    let s = 1.0 - t;
    Ok(g.map(|v| t * v, |v| s * v)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub t: f64,
    /// MMR solution of the scaled game.
    pub mmr: MmrSolution,
    /// `t·R[p*(t)]`
    pub scaled_row_payoff: f64,
    /// `(1 - t)·C[p*(t)]`
    pub scaled_col_payoff: f64,
    /// `scaled_row_payoff - scaled_col_payoff`
    pub f_value: f64,
    /// Unscaled payoffs `(R[p*(t)], C[p*(t)])`.
    pub row_payoff: f64,
    pub col_payoff: f64,
}

impl ScalingPoint {
    pub fn lambda_star(&self) -> f64 {
        self.mmr.lambda_star
    }
}

pub fn mmr_scaled(
    g: &BimatrixGame,
    t: f64,
    opts: &MmrOptions,
) -> Result<ScalingPoint, ScalingError> {
    let sg = scaled_game(g, t)?;
    let mmr = solve_mmr_with(&sg, opts)?;
    let pay = g.payoff_unchecked(&mmr.x_star, &mmr.y_star);
    // The scaled game's own payoffs are exactly t·R[p] and (1-t)·C[p] up to
    // rounding; use them directly so f is what the scaled solver saw.
    let scaled_row_payoff = mmr.payoffs.row;
    let scaled_col_payoff = mmr.payoffs.col;
    Ok(ScalingPoint {
        t,
        scaled_row_payoff,
        scaled_col_payoff,
        f_value: scaled_row_payoff - scaled_col_payoff,
        row_payoff: pay.row,
        col_payoff: pay.col,
        mmr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BalanceStatus {
    Balanced,
    /// The bracket shrank below `interval_tol` around a jump of `f`.
    BracketOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceOptions {
    pub balance_tol: f64,
    pub interval_tol: f64,
    pub max_iter: usize,
    pub mmr: MmrOptions,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        BalanceOptions {
            balance_tol: 1e-6,
            interval_tol: 1e-9,
            max_iter: 200,
            mmr: MmrOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceResult {
    pub t_star: f64,
    pub status: BalanceStatus,
    pub final_point: ScalingPoint,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisection for `f(t) = 0` on `[0, 1]`, where `f(0) ≤ 0 ≤ f(1)`.
pub fn balance_bisect(
    g: &BimatrixGame,
    opts: &BalanceOptions,
) -> Result<BalanceResult, ScalingError> {
    if g.row_matrix().as_slice().iter().all(|v| *v == 0.0) {
        return Err(ScalingError::ZeroMatrix("row"));
    }
    if g.col_matrix().as_slice().iter().all(|v| *v == 0.0) {
        return Err(ScalingError::ZeroMatrix("column"));
    }
    let tol = opts.balance_tol;
    let eval = |t: f64| mmr_scaled(g, t, &opts.mmr);

    let lo_pt = eval(0.0)?;
    let hi_pt = eval(1.0)?;
    if lo_pt.f_value > tol || hi_pt.f_value < -tol {
        return Err(ScalingError::NoSignChange {
            f0: lo_pt.f_value,
            f1: hi_pt.f_value,
        });
    }
    let done = |pt: ScalingPoint, bracket, iterations, status| BalanceResult {
        t_star: pt.t,
        status,
        final_point: pt,
        bracket,
        iterations,
    };
    if lo_pt.f_value.abs() <= tol {
        return Ok(done(lo_pt, (0.0, 0.0), 0, BalanceStatus::Balanced));
    }
    if hi_pt.f_value.abs() <= tol {
        return Ok(done(hi_pt, (1.0, 1.0), 0, BalanceStatus::Balanced));
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (mut lo_pt, mut hi_pt) = (lo_pt, hi_pt);
    let mut iterations = 0;
    while iterations < opts.max_iter && hi - lo > opts.interval_tol {
        let mid = 0.5 * (lo + hi);
        let pt = eval(mid)?;
        iterations += 1;
        if pt.f_value.abs() <= tol {
            return Ok(done(pt, (lo, hi), iterations, BalanceStatus::Balanced));
        }
        if pt.f_value < 0.0 {
            lo = mid;
            lo_pt = pt;
        } else {
            hi = mid;
            hi_pt = pt;
        }
    }
    let best = if lo_pt.f_value.abs() <= hi_pt.f_value.abs() {
        lo_pt
    } else {
        hi_pt
    };
    Ok(done(best, (lo, hi), iterations, BalanceStatus::BracketOnly))
}

/// MMR at each grid value; points are evaluated in parallel.
pub fn sweep(
    g: &BimatrixGame,
    grid: &[f64],
    opts: &MmrOptions,
) -> Result<Vec<ScalingPoint>, ScalingError> {
    if let Some(&t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(ScalingError::Range(t));
    }
    grid.par_iter().map(|&t| mmr_scaled(g, t, opts)).collect()
}

/// `points` evenly spaced values from 0 to 1 inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..points).map(|k| k as f64 / (points - 1) as f64).collect(),
    }
}
