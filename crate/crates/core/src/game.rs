//! Bimatrix games, mixed profiles and payoff evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

/// Tolerance on `Σ = 1` for probability vectors.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite payoff entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("payoff matrices must have at least one row and one column")]
    EmptyMatrix,
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("weight ({0}, {1}) is not in the 2-simplex")]
    InvalidWeight(f64, f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Payoff matrices `(R, C)` of a two-player game. `R` pays the row player,
/// `C` pays the column player; both are `n × m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame {
    row: Matrix,
    col: Matrix,
    normalized: bool,
}

impl BimatrixGame {
    pub fn new(row: Matrix, col: Matrix) -> Result<Self, GameError> {
        if row.rows() == 0 || row.cols() == 0 || col.rows() == 0 || col.cols() == 0 {
            return Err(GameError::EmptyMatrix);
        }
        if row.rows() != col.rows() || row.cols() != col.cols() {
            return Err(GameError::DimensionMismatch(format!(
                "R is {}x{} but C is {}x{}",
                row.rows(),
                row.cols(),
                col.rows(),
                col.cols()
            )));
        }
        for m in [&row, &col] {
            if let Some(k) = m.as_slice().iter().position(|v| !v.is_finite()) {
                return Err(GameError::NonFiniteEntry {
                    row: k / m.cols(),
                    col: k % m.cols(),
                });
            }
        }
        let normalized = row
            .as_slice()
            .iter()
            .chain(col.as_slice())
            .all(|v| (0.0..=1.0).contains(v));
        Ok(BimatrixGame {
            row,
            col,
            normalized,
        })
    }

    /// Convenience constructor from nested row vectors.
    pub fn from_rows(row: &[Vec<f64>], col: &[Vec<f64>]) -> Result<Self, GameError> {
        let r = Matrix::from_rows(row)
            .ok_or_else(|| GameError::DimensionMismatch("R has ragged rows".into()))?;
        let c = Matrix::from_rows(col)
            .ok_or_else(|| GameError::DimensionMismatch("C has ragged rows".into()))?;
        BimatrixGame::new(r, c)
    }

    /// Number of row actions.
    #[inline]
    pub fn n(&self) -> usize {
        self.row.rows()
    }

    /// Number of column actions.
    #[inline]
    pub fn m(&self) -> usize {
        self.row.cols()
    }

    #[inline]
    pub fn row_matrix(&self) -> &Matrix {
        &self.row
    }

    #[inline]
    pub fn col_matrix(&self) -> &Matrix {
        &self.col
    }

    /// True iff every entry of both matrices lies in `[0, 1]`.
    #[inline]
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Applies `f` to every entry of R and `g` to every entry of C.
    pub fn map(
        &self,
        f: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
    ) -> Result<BimatrixGame, GameError> {
        BimatrixGame::new(self.row.map(f), self.col.map(g))
    }

    pub fn payoff(&self, p: &MixedProfile) -> Result<PayoffPair, GameError> {
        self.check_profile(p)?;
        Ok(self.payoff_unchecked(&p.x, &p.y))
    }

    pub(crate) fn payoff_unchecked(&self, x: &[f64], y: &[f64]) -> PayoffPair {
        PayoffPair {
            row: self.row.bilinear(x, y),
            col: self.col.bilinear(x, y),
        }
    }

    pub(crate) fn check_profile(&self, p: &MixedProfile) -> Result<(), GameError> {
        if p.x.len() != self.n() || p.y.len() != self.m() {
            return Err(GameError::DimensionMismatch(format!(
                "profile is ({}, {}) but game is {}x{}",
                p.x.len(),
                p.y.len(),
                self.n(),
                self.m()
            )));
        }
        Ok(())
    }
}

/// A mixed strategy for each player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl MixedProfile {
    /// Validates that both vectors lie on their simplex.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, GameError> {
        check_simplex(&x, "x")?;
        check_simplex(&y, "y")?;
        Ok(MixedProfile { x, y })
    }

    /// The pure profile `(e_i, e_j)`.
    pub fn pure(n: usize, m: usize, i: usize, j: usize) -> Self {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; m];
        x[i] = 1.0;
        y[j] = 1.0;
        MixedProfile { x, y }
    }

    /// L∞ distance between the concatenated `(x, y)` vectors.
    pub fn linf_distance(&self, other: &MixedProfile) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_simplex(v: &[f64], name: &str) -> Result<(), GameError> {
    if v.is_empty() {
        return Err(GameError::InvalidProbability(format!("{name} is empty")));
    }
    if v.iter().any(|p| !p.is_finite() || *p < -SIMPLEX_TOL) {
        return Err(GameError::InvalidProbability(format!(
            "{name} has a negative or non-finite entry"
        )));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(GameError::InvalidProbability(format!(
            "{name} sums to {s}"
        )));
    }
    Ok(())
}

/// Scales a nonnegative vector so it sums to one.
pub(crate) fn normalize(v: &mut [f64]) {
    for p in v.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|p| *p /= s);
    }
}

/// Expected payoffs `(xᵀRy, xᵀCy)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub row: f64,
    pub col: f64,
}

/// A point `(α₁, α₂)` of the 2-simplex: the weights on the row and column
/// player's payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub row: f64,
    pub col: f64,
}

impl Weight {
    pub fn new(row: f64, col: f64) -> Result<Self, GameError> {
        if !(row >= -SIMPLEX_TOL && col >= -SIMPLEX_TOL && (row + col - 1.0).abs() <= SIMPLEX_TOL)
        {
            return Err(GameError::InvalidWeight(row, col));
        }
        Ok(Weight { row, col })
    }

    /// `(t, 1 - t)`.
    pub fn from_row_weight(t: f64) -> Self {
        Weight { row: t, col: 1.0 - t }
    }

    #[inline]
    pub fn apply(&self, p: PayoffPair) -> f64 {
        self.row * p.row + self.col * p.col
    }
}

/// `α₁·R[p] + α₂·C[p]`.
pub fn weighted_payoff(
    alpha: Weight,
    g: &BimatrixGame,
    p: &MixedProfile,
) -> Result<f64, GameError> {
    let alpha = Weight::new(alpha.row, alpha.col)?;
    Ok(alpha.apply(g.payoff(p)?))
}

/// Uniform `[0, 1)` game drawn from stream 0 of `seed`.
pub fn random_game(n: usize, m: usize, seed: u64) -> Result<BimatrixGame, GameError> {
    random_game_indexed(n, m, seed, 0)
}

/// Uniform `[0, 1)` game drawn from the ChaCha8 stream `index` of `seed`.
///
/// R is filled row-major first, then C, each entry a 53-bit uniform double.
/// Distinct `(seed, index)` pairs give independent games, so batches can be
/// generated in any order or in parallel.
pub fn random_game_indexed(
    n: usize,
    m: usize,
    seed: u64,
    index: u64,
) -> Result<BimatrixGame, GameError> {
    if n == 0 || m == 0 {
        return Err(GameError::EmptyMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let row = Matrix::from_fn(n, m, |_, _| rng.random::<f64>());
    let col = Matrix::from_fn(n, m, |_, _| rng.random::<f64>());
    BimatrixGame::new(row, col)
}

/// Pure-action minimax values of the stacked payoff tensor
/// `a_{1,(i,j)} = R_ij`, `a_{2,(i,j)} = C_ij`.
///
/// Returns `(min_k max_cell a_k, max_cell min_k a_k)`. The first is always
/// at least the second.
pub fn pure_minimax(g: &BimatrixGame) -> (f64, f64) {
    let r = g.row_matrix();
    let c = g.col_matrix();
    let meta_min_max = r.max().min(c.max());
    let players_max_min = r
        .as_slice()
        .iter()
        .zip(c.as_slice())
        .map(|(a, b)| a.min(*b))
        .fold(f64::NEG_INFINITY, f64::max);
    (meta_min_max, players_max_min)
}
