//! Argument parsing and subcommand execution for the `mmr` binary.
//!
//! Exit codes:
//!
//! | code | meaning                                                    |
//! |------|------------------------------------------------------------|
//! | 0    | success                                                    |
//! | 1    | I/O failure (unreadable input, unwritable output)          |
//! | 2    | malformed command line or game file                        |
//! | 3    | solver failure, including an unbalanceable scaling         |
//! | 4    | Lemke-Howson budget exhausted (single game, or most games) |

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use mmr_core::{
    balance_bisect, lh_enumerate_with, perturb_game, random_game_indexed, solve_mmr_with, sweep,
    uniform_grid, Arithmetic, BalanceOptions, BalanceStatus, BimatrixGame, LhOptions, MmrMethod,
    MmrOptions, NashEquilibrium, PayoffPair, ScalingError, Weight,
};
use serde::Serialize;
use thiserror::Error;

use crate::experiments::{
    run_batch, write_records_csv, write_sweep_csv, BatchConfig, BatchSummary, LhStatus,
};
use crate::formats::{emit_game_json, emit_nfg, parse_game, ParseError};

#[derive(Debug, Parser)]
#[command(name = "mmr", version, about = "Bimatrix game solvers and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Output path (a directory for `gen`). Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameFormat {
    Json,
    Nfg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Simplex,
    Specialized,
}

impl From<MethodArg> for MmrMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => MmrMethod::Auto,
            MethodArg::Simplex => MmrMethod::Simplex,
            MethodArg::Specialized => MmrMethod::Specialized,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded uniform [0, 1) games as game_NNNNN.json files.
    Gen {
        #[arg(long)]
        n: usize,
        /// Column count; defaults to `n`.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the minimax relaxation of a game file.
    SolveMmr {
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Relative duality-gap tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Enumerate equilibria reachable by Lemke-Howson paths.
    SolveLh {
        game: PathBuf,
        #[arg(long, value_parser = humantime::parse_duration, default_value = "30m")]
        budget: Duration,
        /// Exact rational pivoting (games up to 10x10).
        #[arg(long)]
        rational: bool,
        /// Add uniform noise of this magnitude before solving.
        #[arg(long)]
        perturb: Option<f64>,
        /// Seed for `--perturb`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest accepted regret of a reported equilibrium.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare MMR with Lemke-Howson on seeded random square games.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lemke-Howson wall-clock budget per game.
        #[arg(long, value_parser = humantime::parse_duration, default_value = "30m")]
        budget: Duration,
    },
    /// Bisect for a scaling t with equal scaled payoffs.
    Balance {
        game: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Tabulate MMR payoffs over a uniform grid of scalings as CSV.
    Sweep {
        game: PathBuf,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Convert between JSON and NFG game files.
    Convert {
        input: PathBuf,
        /// Target format; defaults to the one the input is not in.
        #[arg(long, value_enum)]
        to: Option<GameFormat>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}

/// Successful runs either finish cleanly or report partial results after a
/// budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    TimedOut,
}

pub const EXIT_TIMEOUT: i32 = 4;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, stdout) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::TimedOut) => EXIT_TIMEOUT,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_game(path: &Path) -> Result<BimatrixGame, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_game(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Sends `body` to `--out` when given, otherwise to `stdout`.
fn emit(cli: &Cli, stdout: &mut dyn Write, body: &[u8]) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => fs::write(p, body).map_err(io_err(p)),
        None => stdout
            .write_all(body)
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("report types serialize");
    s.push(b'\n');
    s
}

fn csv_unsupported(cmd: &str) -> CliError {
    CliError::Usage(format!("--format csv is not available for {cmd}"))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Gen { n, m, count, seed } => cmd_gen(cli, stdout, *n, m.unwrap_or(*n), *count, *seed),
        Command::SolveMmr { game, method, tol } => cmd_solve_mmr(cli, stdout, game, *method, *tol),
        Command::SolveLh {
            game,
            budget,
            rational,
            perturb,
            seed,
            tol,
        } => cmd_solve_lh(cli, stdout, game, *budget, *rational, *perturb, *seed, *tol),
        Command::Compare {
            sizes,
            count,
            seed,
            budget,
        } => cmd_compare(cli, stdout, sizes, *count, *seed, *budget),
        Command::Balance { game, tol } => cmd_balance(cli, stdout, game, *tol),
        Command::Sweep { game, points } => cmd_sweep(cli, stdout, game, *points),
        Command::Convert { input, to } => cmd_convert(cli, stdout, input, *to),
    }
}

fn cmd_gen(
    cli: &Cli,
    stdout: &mut dyn Write,
    n: usize,
    m: usize,
    count: usize,
    seed: u64,
) -> Result<Outcome, CliError> {
    let dir = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("gen requires --out <DIR>".into()))?;
    if n == 0 || m == 0 {
        return Err(CliError::Usage("game sizes must be positive".into()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::with_capacity(count);
    for k in 0..count {
        let g = random_game_indexed(n, m, seed, k as u64)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let path = dir.join(format!("game_{k:05}.json"));
        fs::write(&path, emit_game_json(&g)).map_err(io_err(&path))?;
        written.push(path);
    }
    let body = match cli.format {
        Format::Json => to_json(&written),
        _ => written
            .iter()
            .map(|p| format!("{}\n", p.display()))
            .collect::<String>()
            .into_bytes(),
    };
    stdout.write_all(&body).map_err(io_err(Path::new("<stdout>")))?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct MmrReport {
    n: usize,
    m: usize,
    x_star: Vec<f64>,
    y_star: Vec<f64>,
    alpha_star: Weight,
    delta_star: f64,
    lambda_star: f64,
    payoffs: PayoffPair,
    joint_payoffs: PayoffPair,
    saddle_gap: f64,
    support: Vec<(usize, usize)>,
    method: MmrMethod,
}

fn cmd_solve_mmr(
    cli: &Cli,
    stdout: &mut dyn Write,
    path: &Path,
    method: MethodArg,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    if cli.format == Format::Csv {
        return Err(csv_unsupported("solve-mmr"));
    }
    let g = read_game(path)?;
    let mut opts = MmrOptions {
        method: method.into(),
        ..MmrOptions::default()
    };
    if let Some(t) = tol {
        opts.duality_tol = t;
    }
    let s = solve_mmr_with(&g, &opts).map_err(|e| CliError::Solver(e.to_string()))?;
    let report = MmrReport {
        n: g.n(),
        m: g.m(),
        support: s.support(1e-12),
        x_star: s.x_star,
        y_star: s.y_star,
        alpha_star: s.alpha_star,
        delta_star: s.delta_star,
        lambda_star: s.lambda_star,
        payoffs: s.payoffs,
        joint_payoffs: s.joint_payoffs,
        saddle_gap: s.saddle_gap,
        method: s.method,
    };
    let body = match cli.format {
        Format::Json => to_json(&report),
        _ => format!(
            "x*      = {}\ny*      = {}\nalpha*  = ({:.6}, {:.6})\ndelta*  = {:.9}\nlambda* = {:.9}\npayoffs = ({:.6}, {:.6})\njoint   = ({:.6}, {:.6})\nmethod  = {:?}\n",
            fmt_vec(&report.x_star),
            fmt_vec(&report.y_star),
            report.alpha_star.row,
            report.alpha_star.col,
            report.delta_star,
            report.lambda_star,
            report.payoffs.row,
            report.payoffs.col,
            report.joint_payoffs.row,
            report.joint_payoffs.col,
            report.method,
        )
        .into_bytes(),
    };
    emit(cli, stdout, &body)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct LhReport<'a> {
    status: LhStatus,
    elapsed_s: f64,
    equilibria: &'a [NashEquilibrium],
    failures: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve_lh(
    cli: &Cli,
    stdout: &mut dyn Write,
    path: &Path,
    budget: Duration,
    rational: bool,
    perturb: Option<f64>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let mut g = read_game(path)?;
    if let Some(mag) = perturb {
        g = perturb_game(&g, mag, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut opts = LhOptions {
        arithmetic: if rational {
            Arithmetic::Rational
        } else {
            Arithmetic::Float
        },
        deadline: Some(std::time::Instant::now() + budget),
        ..LhOptions::default()
    };
    if let Some(t) = tol {
        opts.verify_eps = t;
    }
    let res = lh_enumerate_with(&g, &opts);
    let status = if res.timed_out {
        LhStatus::TimedOut
    } else if res.equilibria.is_empty() {
        LhStatus::Degenerate
    } else {
        LhStatus::Completed
    };
    let failures: Vec<String> = res
        .failures
        .iter()
        .map(|(from, label, e)| match from {
            Some(i) => format!("from equilibrium {i}, label {label}: {e}"),
            None => format!("label {label}: {e}"),
        })
        .collect();
    if status == LhStatus::Degenerate {
        let first = failures.first().cloned().unwrap_or_default();
        return Err(CliError::Solver(format!(
            "no equilibrium found ({first}); the game may be degenerate, retry with --perturb 1e-9"
        )));
    }
    let body = match cli.format {
        Format::Json => to_json(&LhReport {
            status,
            elapsed_s: res.elapsed.as_secs_f64(),
            equilibria: &res.equilibria,
            failures,
        }),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let to_csv = |e: csv::Error| CliError::Io {
                path: "<csv>".into(),
                source: e.into(),
            };
            w.write_record(["index", "row_payoff", "col_payoff", "x", "y"])
                .map_err(to_csv)?;
            for (i, e) in res.equilibria.iter().enumerate() {
                let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
                w.write_record([
                    i.to_string(),
                    e.payoffs.row.to_string(),
                    e.payoffs.col.to_string(),
                    join(&e.x_star),
                    join(&e.y_star),
                ])
                .map_err(to_csv)?;
            }
            w.into_inner().map_err(|e| CliError::Io {
                path: "<csv>".into(),
                source: e.into_error(),
            })?
        }
        Format::Text => {
            let mut s = format!(
                "status: {status:?}, {} equilibria in {:.3}s\n",
                res.equilibria.len(),
                res.elapsed.as_secs_f64()
            );
            for (i, e) in res.equilibria.iter().enumerate() {
                s += &format!(
                    "#{i}: payoffs ({:.6}, {:.6})\n    x = {}\n    y = {}\n",
                    e.payoffs.row,
                    e.payoffs.col,
                    fmt_vec(&e.x_star),
                    fmt_vec(&e.y_star)
                );
            }
            for f in &failures {
                s += &format!("failed path: {f}\n");
            }
            s.into_bytes()
        }
    };
    emit(cli, stdout, &body)?;
    Ok(if status == LhStatus::TimedOut {
        Outcome::TimedOut
    } else {
        Outcome::Done
    })
}

fn cmd_compare(
    cli: &Cli,
    stdout: &mut dyn Write,
    sizes: &[usize],
    count: usize,
    seed: u64,
    budget: Duration,
) -> Result<Outcome, CliError> {
    if sizes.contains(&0) {
        return Err(CliError::Usage("game sizes must be positive".into()));
    }
    let cfg = BatchConfig {
        seed,
        count,
        lh_budget: budget,
        mmr: MmrOptions::default(),
    };
    let records = run_batch(sizes, &cfg);
    if let Some(p) = &cli.out {
        let f = fs::File::create(p).map_err(io_err(p))?;
        write_records_csv(&records, f).map_err(|e| CliError::Io {
            path: p.clone(),
            source: e.into(),
        })?;
    }
    let summary = BatchSummary::from_records(&records);
    let per_size: Vec<(usize, BatchSummary)> = sizes
        .iter()
        .map(|&n| {
            let rs: Vec<_> = records.iter().filter(|r| r.n == n).cloned().collect();
            (n, BatchSummary::from_records(&rs))
        })
        .collect();
    let body = match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_records_csv(&records, &mut buf).map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e.into(),
            })?;
            buf
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Report<'a> {
                overall: &'a BatchSummary,
                by_size: Vec<(usize, &'a BatchSummary)>,
            }
            to_json(&Report {
                overall: &summary,
                by_size: per_size.iter().map(|(n, s)| (*n, s)).collect(),
            })
        }
        Format::Text => {
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
            let mut s = String::from(
                "size  games  lh_done  both_better  pct    rel_err  stderr   lh_early  mmr_mean_s  lh_mean_s\n",
            );
            for (n, b) in per_size.iter().chain(std::iter::once(&(0, summary.clone()))) {
                let label = if *n == 0 { "all".to_string() } else { n.to_string() };
                s += &format!(
                    "{label:<5} {:<6} {:<8} {:<12} {:<6} {:<8} {:<8} {:<9} {:<11.6} {:.6}\n",
                    b.games_run,
                    b.games_lh_completed,
                    b.both_better,
                    opt(b.pct_both_better),
                    opt(b.mean_relative_error),
                    opt(b.stderr_relative_error),
                    opt(b.lh_early_termination_rate),
                    b.mmr_time.mean_s,
                    b.lh_time.mean_s
                );
            }
            s.into_bytes()
        }
    };
    stdout.write_all(&body).map_err(io_err(Path::new("<stdout>")))?;
    Ok(if summary.timeout_dominated() {
        Outcome::TimedOut
    } else {
        Outcome::Done
    })
}

#[derive(Serialize)]
struct BalanceReport {
    t_star: f64,
    status: BalanceStatus,
    bracket: (f64, f64),
    iterations: usize,
    f: f64,
    scaled_payoffs: PayoffPair,
    payoffs: PayoffPair,
    x_star: Vec<f64>,
    y_star: Vec<f64>,
}

fn cmd_balance(cli: &Cli, stdout: &mut dyn Write, path: &Path, tol: f64) -> Result<Outcome, CliError> {
    if cli.format == Format::Csv {
        return Err(csv_unsupported("balance"));
    }
    let g = read_game(path)?;
    let opts = BalanceOptions {
        balance_tol: tol,
        ..BalanceOptions::default()
    };
    let res = balance_bisect(&g, &opts).map_err(|e| match e {
        ScalingError::NoSignChange { .. } | ScalingError::ZeroMatrix(_) => CliError::Solver(format!(
            "{e}; balancing needs f(0) <= 0 <= f(1), which holds when both payoff matrices have a positive entry"
        )),
        e => CliError::Solver(e.to_string()),
    })?;
    let pt = &res.final_point;
    let report = BalanceReport {
        t_star: res.t_star,
        status: res.status,
        bracket: res.bracket,
        iterations: res.iterations,
        f: pt.f_value,
        scaled_payoffs: PayoffPair {
            row: pt.scaled_row_payoff,
            col: pt.scaled_col_payoff,
        },
        payoffs: PayoffPair {
            row: pt.row_payoff,
            col: pt.col_payoff,
        },
        x_star: pt.mmr.x_star.clone(),
        y_star: pt.mmr.y_star.clone(),
    };
    let body = match cli.format {
        Format::Json => to_json(&report),
        _ => format!(
            "t*       = {:.12}\nstatus   = {:?}\nbracket  = [{:.12}, {:.12}]\niterations = {}\nf(t*)    = {:e}\nscaled   = ({:.6}, {:.6})\npayoffs  = ({:.6}, {:.6})\nx*       = {}\ny*       = {}\n",
            report.t_star,
            report.status,
            report.bracket.0,
            report.bracket.1,
            report.iterations,
            report.f,
            report.scaled_payoffs.row,
            report.scaled_payoffs.col,
            report.payoffs.row,
            report.payoffs.col,
            fmt_vec(&report.x_star),
            fmt_vec(&report.y_star),
        )
        .into_bytes(),
    };
    emit(cli, stdout, &body)?;
    Ok(Outcome::Done)
}

/// `points` uniform values on `[0, 1]`, plus `0.5` when the grid misses it.
pub fn sweep_grid(points: usize) -> Vec<f64> {
    let mut grid = uniform_grid(points);
    if !grid.contains(&0.5) {
        let at = grid.partition_point(|t| *t < 0.5);
        grid.insert(at, 0.5);
    }
    grid
}

fn cmd_sweep(cli: &Cli, stdout: &mut dyn Write, path: &Path, points: usize) -> Result<Outcome, CliError> {
    if points < 2 {
        return Err(CliError::Usage("sweep needs --points >= 2".into()));
    }
    let g = read_game(path)?;
    let pts = sweep(&g, &sweep_grid(points), &MmrOptions::default())
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let mut buf = Vec::new();
    write_sweep_csv(&pts, &mut buf).map_err(|e| CliError::Io {
        path: "<csv>".into(),
        source: e.into(),
    })?;
    emit(cli, stdout, &buf)?;
    Ok(Outcome::Done)
}

fn cmd_convert(
    cli: &Cli,
    stdout: &mut dyn Write,
    path: &Path,
    to: Option<GameFormat>,
) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let is_nfg = text.trim_start().starts_with("NFG");
    let g = parse_game(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })?;
    let target = to.unwrap_or(if is_nfg { GameFormat::Json } else { GameFormat::Nfg });
    let body = match target {
        GameFormat::Json => emit_game_json(&g),
        GameFormat::Nfg => {
            let title = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            emit_nfg(&g, &title)
        }
    };
    emit(cli, stdout, body.as_bytes())?;
    Ok(Outcome::Done)
}
