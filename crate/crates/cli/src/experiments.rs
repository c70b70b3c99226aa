//! Seeded batch comparison of MMR against Lemke-Howson, and CSV emission
//! for batch records and scaling sweeps.

use std::io::{Read, Write};
use std::time::{Duration, Instant};

use mmr_core::{
    lh_enumerate, random_game_indexed, solve_mmr_with, BimatrixGame, MmrOptions, PayoffPair,
    ScalingPoint,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Payoff comparisons treat values within this distance as equal.
pub const COMPARE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LhStatus {
    Completed,
    TimedOut,
    /// Every path failed (degenerate pivoting) and no equilibrium was found.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRecord {
    pub game_id: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// Payoffs of the MMR profile, `None` if the MMR solve failed.
    pub mmr: Option<PayoffPair>,
    /// `(⟨R, Q⟩, ⟨C, Q⟩)` of the MMR joint distribution.
    pub mmr_joint: Option<PayoffPair>,
    pub ne_payoffs: Vec<PayoffPair>,
    pub both_better: bool,
    pub worse_player_relative_error: Option<f64>,
    pub mmr_time: Duration,
    pub lh_time: Duration,
    pub lh_status: LhStatus,
    pub error: Option<String>,
}

impl ComparisonRecord {
    /// Largest equilibrium payoff of each player.
    pub fn max_ne(&self) -> Option<PayoffPair> {
        if self.ne_payoffs.is_empty() {
            return None;
        }
        Some(PayoffPair {
            row: self.ne_payoffs.iter().map(|p| p.row).fold(f64::MIN, f64::max),
            col: self.ne_payoffs.iter().map(|p| p.col).fold(f64::MIN, f64::max),
        })
    }

    /// Whether this game enters the payoff statistics.
    pub fn is_compared(&self) -> bool {
        self.lh_status == LhStatus::Completed && self.mmr.is_some()
    }
}

/// Compares `mmr` with the best equilibrium payoff of each player.
///
/// Returns `(both_better, worse_player_relative_error)`. The error is
/// `(ne - mmr) / ne` for the player who is worse off; if both are, the
/// larger of the two.
pub fn compare_payoffs(mmr: PayoffPair, ne: &[PayoffPair]) -> (bool, Option<f64>) {
    let Some(best_row) = ne.iter().map(|p| p.row).reduce(f64::max) else {
        return (true, None);
    };
    let best_col = ne.iter().map(|p| p.col).fold(f64::MIN, f64::max);
    let rel = |best: f64, got: f64| {
        if got >= best - COMPARE_TOL {
            None
        } else {
            Some((best - got) / best)
        }
    };
    match (rel(best_row, mmr.row), rel(best_col, mmr.col)) {
        (None, None) => (true, None),
        (a, b) => (false, a.into_iter().chain(b).reduce(f64::max)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchConfig {
    pub seed: u64,
    pub count: usize,
    pub lh_budget: Duration,
    pub mmr: MmrOptions,
}

pub fn compare_game(g: &BimatrixGame, game_id: u64, seed: u64, cfg: &BatchConfig) -> ComparisonRecord {
    let t0 = Instant::now();
    let mmr = solve_mmr_with(g, &cfg.mmr);
    let mmr_time = t0.elapsed();
    let lh = lh_enumerate(g, cfg.lh_budget);

    let lh_status = if lh.timed_out {
        LhStatus::TimedOut
    } else if lh.equilibria.is_empty() {
        LhStatus::Degenerate
    } else {
        LhStatus::Completed
    };
    let ne_payoffs: Vec<PayoffPair> = lh.equilibria.iter().map(|e| e.payoffs).collect();
    let (mmr_pay, mmr_joint, error) = match &mmr {
        Ok(s) => (Some(s.payoffs), Some(s.joint_payoffs), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let error = error.or_else(|| {
        (lh_status == LhStatus::Degenerate)
            .then(|| lh.failures.first().map(|f| f.2.to_string()))
            .flatten()
    });
    let (both_better, worse_player_relative_error) = match mmr_pay {
        Some(p) if lh_status == LhStatus::Completed => compare_payoffs(p, &ne_payoffs),
        _ => (false, None),
    };
    ComparisonRecord {
        game_id,
        seed,
        n: g.n(),
        m: g.m(),
        mmr: mmr_pay,
        mmr_joint,
        ne_payoffs,
        both_better,
        worse_player_relative_error,
        mmr_time,
        lh_time: lh.elapsed,
        lh_status,
        error,
    }
}

/// Runs `cfg.count` games of every size. Game `k` of size `n` is
/// `random_game_indexed(n, n, cfg.seed, k)`, so records do not depend on
/// scheduling. Output is ordered by size, then game id.
pub fn run_batch(sizes: &[usize], cfg: &BatchConfig) -> Vec<ComparisonRecord> {
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| (0..cfg.count as u64).map(move |k| (n, k)))
        .collect();
    jobs.par_iter()
        .map(|&(n, k)| match random_game_indexed(n, n, cfg.seed, k) {
            Ok(g) => compare_game(&g, k, cfg.seed, cfg),
            Err(e) => ComparisonRecord {
                game_id: k,
                seed: cfg.seed,
                n,
                m: n,
                mmr: None,
                mmr_joint: None,
                ne_payoffs: Vec::new(),
                both_better: false,
                worse_player_relative_error: None,
                mmr_time: Duration::ZERO,
                lh_time: Duration::ZERO,
                lh_status: LhStatus::Degenerate,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TimingSummary {
    pub mean_s: f64,
    pub max_s: f64,
    pub total_s: f64,
}

impl TimingSummary {
    fn of(times: impl Iterator<Item = Duration>) -> Self {
        let secs: Vec<f64> = times.map(|d| d.as_secs_f64()).collect();
        if secs.is_empty() {
            return Self::default();
        }
        let total: f64 = secs.iter().sum();
        TimingSummary {
            mean_s: total / secs.len() as f64,
            max_s: secs.iter().cloned().fold(0.0, f64::max),
            total_s: total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub games_run: usize,
    pub games_lh_completed: usize,
    /// Completed games whose MMR solve also succeeded.
    pub games_compared: usize,
    pub both_better: usize,
    /// Over compared games; `None` when there are none.
    pub pct_both_better: Option<f64>,
    pub relative_errors: usize,
    pub mean_relative_error: Option<f64>,
    /// Sample standard deviation over `sqrt(count)`; needs two errors.
    pub stderr_relative_error: Option<f64>,
    pub lh_early_termination_rate: Option<f64>,
    pub lh_degenerate: usize,
    pub mmr_failures: usize,
    pub mmr_time: TimingSummary,
    pub lh_time: TimingSummary,
}

impl BatchSummary {
    pub fn from_records(records: &[ComparisonRecord]) -> Self {
        let games_run = records.len();
        let count = |f: &dyn Fn(&ComparisonRecord) -> bool| records.iter().filter(|r| f(r)).count();
        let games_lh_completed = count(&|r| r.lh_status == LhStatus::Completed);
        let games_compared = count(&|r| r.is_compared());
        let both_better = count(&|r| r.is_compared() && r.both_better);
        let timed_out = count(&|r| r.lh_status == LhStatus::TimedOut);
        let errs: Vec<f64> = records
            .iter()
            .filter_map(|r| r.worse_player_relative_error)
            .collect();
        let mean = (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64);
        let stderr = mean.filter(|_| errs.len() >= 2).map(|mu| {
            let var = errs.iter().map(|e| (e - mu).powi(2)).sum::<f64>() / (errs.len() - 1) as f64;
            var.sqrt() / (errs.len() as f64).sqrt()
        });
        BatchSummary {
            games_run,
            games_lh_completed,
            games_compared,
            both_better,
            pct_both_better: (games_compared > 0)
                .then(|| both_better as f64 / games_compared as f64),
            relative_errors: errs.len(),
            mean_relative_error: mean,
            stderr_relative_error: stderr,
            lh_early_termination_rate: (games_run > 0)
                .then(|| timed_out as f64 / games_run as f64),
            lh_degenerate: count(&|r| r.lh_status == LhStatus::Degenerate),
            mmr_failures: count(&|r| r.mmr.is_none()),
            mmr_time: TimingSummary::of(records.iter().map(|r| r.mmr_time)),
            lh_time: TimingSummary::of(records.iter().map(|r| r.lh_time)),
        }
    }

    /// More than half of the games hit the Lemke-Howson budget.
    pub fn timeout_dominated(&self) -> bool {
        self.games_run > 0 && self.lh_early_termination_rate.unwrap_or(0.0) > 0.5
    }
}

/// One CSV row per game. `ne_payoffs` lists `row:col` pairs joined by `;`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub game_id: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub mmr_row: Option<f64>,
    pub mmr_col: Option<f64>,
    pub mmr_joint_row: Option<f64>,
    pub mmr_joint_col: Option<f64>,
    pub num_equilibria: usize,
    pub max_ne_row: Option<f64>,
    pub max_ne_col: Option<f64>,
    pub both_better: bool,
    pub worse_player_relative_error: Option<f64>,
    pub mmr_time_s: f64,
    pub lh_time_s: f64,
    pub lh_status: LhStatus,
    pub ne_payoffs: String,
    pub error: Option<String>,
}

impl From<&ComparisonRecord> for CsvRecord {
    fn from(r: &ComparisonRecord) -> Self {
        let max = r.max_ne();
        CsvRecord {
            game_id: r.game_id,
            seed: r.seed,
            n: r.n,
            m: r.m,
            mmr_row: r.mmr.map(|p| p.row),
            mmr_col: r.mmr.map(|p| p.col),
            mmr_joint_row: r.mmr_joint.map(|p| p.row),
            mmr_joint_col: r.mmr_joint.map(|p| p.col),
            num_equilibria: r.ne_payoffs.len(),
            max_ne_row: max.map(|p| p.row),
            max_ne_col: max.map(|p| p.col),
            both_better: r.both_better,
            worse_player_relative_error: r.worse_player_relative_error,
            mmr_time_s: r.mmr_time.as_secs_f64(),
            lh_time_s: r.lh_time.as_secs_f64(),
            lh_status: r.lh_status,
            ne_payoffs: r
                .ne_payoffs
                .iter()
                .map(|p| format!("{}:{}", p.row, p.col))
                .collect::<Vec<_>>()
                .join(";"),
            error: r.error.clone(),
        }
    }
}

impl CsvRecord {
    pub fn to_record(&self) -> Result<ComparisonRecord, String> {
        let ne_payoffs = self
            .ne_payoffs
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                let (a, b) = s.split_once(':').ok_or_else(|| format!("bad pair `{s}`"))?;
                Ok(PayoffPair {
                    row: a.parse().map_err(|_| format!("bad payoff `{a}`"))?,
                    col: b.parse().map_err(|_| format!("bad payoff `{b}`"))?,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let pair = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(row, col)| PayoffPair { row, col });
        Ok(ComparisonRecord {
            game_id: self.game_id,
            seed: self.seed,
            n: self.n,
            m: self.m,
            mmr: pair(self.mmr_row, self.mmr_col),
            mmr_joint: pair(self.mmr_joint_row, self.mmr_joint_col),
            ne_payoffs,
            both_better: self.both_better,
            worse_player_relative_error: self.worse_player_relative_error,
            mmr_time: Duration::from_secs_f64(self.mmr_time_s),
            lh_time: Duration::from_secs_f64(self.lh_time_s),
            lh_status: self.lh_status,
            error: self.error.clone(),
        })
    }
}

pub fn write_records_csv<W: Write>(records: &[ComparisonRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRecord::from(r))?;
    }
    if records.is_empty() {
        w.write_record(RECORD_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

pub const RECORD_HEADER: [&str; 18] = [
    "game_id",
    "seed",
    "n",
    "m",
    "mmr_row",
    "mmr_col",
    "mmr_joint_row",
    "mmr_joint_col",
    "num_equilibria",
    "max_ne_row",
    "max_ne_col",
    "both_better",
    "worse_player_relative_error",
    "mmr_time_s",
    "lh_time_s",
    "lh_status",
    "ne_payoffs",
    "error",
];

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<ComparisonRecord>, String> {
    let mut rd = csv::Reader::from_reader(input);
    rd.deserialize::<CsvRecord>()
        .map(|row| row.map_err(|e| e.to_string())?.to_record())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    /// Unscaled payoffs `R[p*(t)]`, `C[p*(t)]`.
    pub row_payoff: f64,
    pub col_payoff: f64,
    /// `t·R[p*(t)] - (1 - t)·C[p*(t)]`
    pub f: f64,
    pub lambda_star: f64,
}

impl From<&ScalingPoint> for SweepRow {
    fn from(p: &ScalingPoint) -> Self {
        SweepRow {
            t: p.t,
            row_payoff: p.row_payoff,
            col_payoff: p.col_payoff,
            f: p.f_value,
            lambda_star: p.lambda_star(),
        }
    }
}

pub const SWEEP_HEADER: [&str; 5] = ["t", "row_payoff", "col_payoff", "f", "lambda_star"];

pub fn write_sweep_csv<W: Write>(points: &[ScalingPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if points.is_empty() {
        w.write_record(SWEEP_HEADER)?;
    }
    for p in points {
        w.serialize(SweepRow::from(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> csv::Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
