//! Solvers for two-player (bimatrix) games.
//!
//! The crate is organised around four pieces:
//!
//! - [`game`]: payoff matrices, mixed profiles, payoff evaluation and seeded
//!   random game generation.
//! - [`lp`]: a dense two-phase simplex solver with a lexicographic ratio test.
//! - [`mmr`]: the multilinear minimax relaxation, solved through its LP pair.
//! - [`nash`]: Lemke-Howson complementary pivoting, support enumeration and
//!   an epsilon-Nash verifier.
//! - [`scaling`]: convex rescaling of the payoff pair and a bisection search
//!   for a scaling with equal MMR payoffs.

pub mod game;
pub mod linalg;
pub mod lp;
pub mod mmr;
pub mod nash;
pub mod scaling;

pub use game::{
    pure_minimax, random_game, random_game_indexed, weighted_payoff, BimatrixGame, GameError,
    MixedProfile, PayoffPair, Weight,
};
pub use lp::{solve_lp, to_standard_form, LpError, LpOptions, LpProblem, LpSolution, LpStatus};
pub use mmr::{
    build_dlp, dominance_report, minimize_alpha, recover_alpha_tight, solve_mmr,
    solve_mmr_with, DominanceReport, MmrError, MmrMethod, MmrOptions, MmrSolution,
};
pub use nash::{
    is_nash, lh_enumerate, lh_enumerate_with, lh_solve, lh_solve_with, perturb_game, regret,
    support_enumeration,
    Arithmetic, LhEnumeration, LhError, LhOptions, NashEquilibrium, Origin,
};
pub use scaling::{
    balance_bisect, mmr_scaled, scaled_game, sweep, uniform_grid, BalanceOptions, BalanceResult,
    BalanceStatus, ScalingError, ScalingPoint,
};
