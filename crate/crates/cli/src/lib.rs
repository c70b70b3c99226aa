//! Command-line front end for `mmr-core`: game file formats, the
//! MMR vs Lemke-Howson batch harness and the `mmr` subcommands.

pub mod app;
pub mod experiments;
pub mod formats;

pub use app::{run, Cli, CliError, Command, Format};
pub use experiments::{
    compare_game, compare_payoffs, run_batch, BatchConfig, BatchSummary, ComparisonRecord,
    LhStatus,
};
pub use formats::{emit_game_json, emit_nfg, parse_game, parse_game_json, parse_nfg, ParseError};
