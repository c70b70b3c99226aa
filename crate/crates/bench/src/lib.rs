//! Benchmark fixtures shared by the criterion targets.

use mmr_core::{random_game_indexed, BimatrixGame};

/// Seed used by every benchmark game.
pub const BENCH_SEED: u64 = 20_240_601;

pub fn square_game(n: usize) -> BimatrixGame {
    random_game_indexed(n, n, BENCH_SEED, n as u64).expect("positive size")
}
