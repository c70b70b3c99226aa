use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmr_cli::experiments::{read_records_csv, read_sweep_csv, BatchSummary};
use mmr_cli::{emit_game_json, parse_game_json, parse_nfg};
use mmr_core::{random_game, sweep, BimatrixGame, MmrOptions};
use serde_json::Value;

fn mmr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_game(dir: &Path, name: &str, g: &BimatrixGame) -> String {
    let p = dir.join(name);
    fs::write(&p, emit_game_json(g)).unwrap();
    p.to_string_lossy().into_owned()
}

fn pair(v: &Value) -> (f64, f64) {
    (v["row"].as_f64().unwrap(), v["col"].as_f64().unwrap())
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = mmr(&["gen", "--n", "10", "--m", "10", "--count", "3", "--seed", "42", "--out", d.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let names: Vec<PathBuf> = (0..3).map(|k| PathBuf::from(format!("game_{k:05}.json"))).collect();
    for name in &names {
        let ta = fs::read(a.join(name)).unwrap();
        assert_eq!(ta, fs::read(b.join(name)).unwrap());
        let g = parse_game_json(std::str::from_utf8(&ta).unwrap()).unwrap();
        assert_eq!((g.n(), g.m()), (10, 10));
        assert!(g.is_normalized());
    }
    assert_eq!(fs::read_dir(&a).unwrap().count(), 3);

    let one = dir.path().join("one");
    assert!(mmr(&["gen", "--n", "1", "--seed", "7", "--out", one.to_str().unwrap()]).status.success());
    let g = parse_game_json(&fs::read_to_string(one.join("game_00000.json")).unwrap()).unwrap();
    assert_eq!((g.n(), g.m()), (1, 1));
}

#[test]
fn solve_mmr_reports() {
    let out = mmr(&["solve-mmr", &data("example_2x2.json"), "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(pair(&v["payoffs"]), (5.0, 3.0));
    assert_eq!(v["x_star"], serde_json::json!([1.0, 0.0]));
    assert!((v["lambda_star"].as_f64().unwrap() - 3.0).abs() < 1e-9);

    let out = mmr(&["solve-mmr", &data("example_3x3.json"), "--format", "json", "--method", "specialized"]);
    assert!(out.status.success());
    let (r, c) = pair(&json(&out)["payoffs"]);
    assert!((r - 0.850).abs() < 1e-9 && (c - 0.904).abs() < 1e-9);

    let out = mmr(&["solve-mmr", &data("example_2x2.nfg")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("payoffs = (5.000000, 3.000000)"), "{text}");
}

#[test]
fn malformed_game_exits_2() {
    let out = mmr(&["solve-mmr", &data("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `C`"));
    assert_eq!(mmr(&["solve-mmr"]).status.code(), Some(2));
    assert_eq!(mmr(&["solve-lh", &data("example_2x2.json"), "--budget", "soon"]).status.code(), Some(2));
}

#[test]
fn solve_lh_lists_equilibria() {
    let out = mmr(&["solve-lh", &data("example_3x3.json"), "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "Completed");
    assert_eq!(v["equilibria"].as_array().unwrap().len(), 3);

    let out = mmr(&["solve-lh", &data("example_2x2.json"), "--format", "json", "--rational"]);
    let v = json(&out);
    let eqs = v["equilibria"].as_array().unwrap();
    assert_eq!(eqs.len(), 1);
    assert_eq!(pair(&eqs[0]["payoffs"]), (5.0, 3.0));

    let out = mmr(&["solve-lh", &data("example_3x3.json"), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,row_payoff,col_payoff,x,y\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn solve_lh_budget_exhaustion_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_game(dir.path(), "big.json", &random_game(300, 300, 5).unwrap());
    let out = mmr(&["solve-lh", &path, "--budget", "1s", "--format", "json"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "TimedOut");
    assert!(v["elapsed_s"].as_f64().unwrap() < 10.0);
}

#[test]
fn compare_csv_matches_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let mut summaries = Vec::new();
    for p in [&csv_a, &csv_b] {
        let out = mmr(&[
            "compare", "--sizes", "3,5", "--count", "8", "--seed", "11", "--budget", "30s",
            "--format", "json", "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        summaries.push(json(&out));
    }
    let a = read_records_csv(fs::File::open(&csv_a).unwrap()).unwrap();
    let b = read_records_csv(fs::File::open(&csv_b).unwrap()).unwrap();
    assert_eq!(a.len(), 16);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.game_id, x.n, &x.mmr, &x.ne_payoffs, x.both_better), (y.game_id, y.n, &y.mmr, &y.ne_payoffs, y.both_better));
        assert_eq!(x.worse_player_relative_error, y.worse_player_relative_error);
    }
    let recomputed = BatchSummary::from_records(&a);
    let overall = &summaries[0]["overall"];
    assert_eq!(overall["games_run"], 16);
    assert_eq!(overall["both_better"].as_u64().unwrap() as usize, recomputed.both_better);
    assert_eq!(overall["pct_both_better"].as_f64(), recomputed.pct_both_better);
    assert_eq!(overall["mean_relative_error"].as_f64(), recomputed.mean_relative_error);
    assert_eq!(summaries[0]["by_size"].as_array().unwrap().len(), 2);
}

#[test]
fn compare_with_no_games() {
    let out = mmr(&["compare", "--sizes", "10", "--count", "0", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["overall"]["games_run"], 0);
    assert!(v["overall"]["pct_both_better"].is_null());
    let out = mmr(&["compare", "--sizes", "10", "--count", "0", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("game_id,seed,n,m,"));
}

#[test]
fn compare_timeout_dominated_exits_4() {
    let out = mmr(&["compare", "--sizes", "300", "--count", "2", "--budget", "200ms"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn balance_command() {
    let dir = tempfile::tempdir().unwrap();
    let r = random_game(6, 6, 3).unwrap().row_matrix().clone();
    let sym = write_game(dir.path(), "sym.json", &BimatrixGame::new(r.clone(), r).unwrap());
    let out = mmr(&["balance", &sym, "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["t_star"].as_f64(), Some(0.5));
    assert_eq!(v["status"], "Balanced");

    let g = random_game(30, 30, 8).unwrap();
    let out = mmr(&["balance", &write_game(dir.path(), "g30.json", &g), "--format", "json", "--tol", "1e-6"]);
    let v = json(&out);
    match v["status"].as_str().unwrap() {
        "Balanced" => assert!(v["f"].as_f64().unwrap().abs() <= 1e-6),
        "BracketOnly" => {
            let b = v["bracket"].as_array().unwrap();
            assert!(b[1].as_f64().unwrap() - b[0].as_f64().unwrap() <= 1e-9);
        }
        s => panic!("unexpected status {s}"),
    }

    let zero = BimatrixGame::from_rows(&[vec![0.0, 0.0]], &[vec![0.2, 0.7]]).unwrap();
    let out = mmr(&["balance", &write_game(dir.path(), "zero.json", &zero)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("f(0) <= 0 <= f(1)"));
}

#[test]
fn sweep_csv() {
    let out = mmr(&["sweep", &data("example_2x2.json"), "--points", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,row_payoff,col_payoff,f,lambda_star\n"));
    let rows = read_sweep_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = mmr(&["sweep", &data("example_2x2.json"), "--points", "101", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = read_sweep_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 101);
    assert!(rows[0].f <= 0.0 && rows[100].f >= 0.0);

    let g = parse_game_json(&fs::read_to_string(data("example_2x2.json")).unwrap()).unwrap();
    let grid: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let direct = sweep(&g, &grid, &MmrOptions::default()).unwrap();
    for (r, p) in rows.iter().zip(&direct) {
        assert!((r.row_payoff - p.row_payoff).abs() <= 1e-12);
        assert!((r.col_payoff - p.col_payoff).abs() <= 1e-12);
        assert!((r.f - p.f_value).abs() <= 1e-12);
        assert!((r.lambda_star - p.lambda_star()).abs() <= 1e-12);
    }
}

#[test]
fn convert_round_trip() {
    let out = mmr(&["convert", &data("example_2x2.nfg")]);
    assert!(out.status.success());
    let g = parse_game_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(g.row_matrix().to_rows(), vec![vec![5.0, 3.0], vec![3.0, 4.0]]);
    assert_eq!(g.col_matrix().to_rows(), vec![vec![3.0, 2.0], vec![2.0, 1.0]]);

    let dir = tempfile::tempdir().unwrap();
    let src = write_game(dir.path(), "rand.json", &random_game(4, 6, 1).unwrap());
    let nfg = dir.path().join("rand.nfg");
    assert!(mmr(&["convert", &src, "--out", nfg.to_str().unwrap()]).status.success());
    let back = parse_nfg(&fs::read_to_string(&nfg).unwrap()).unwrap();
    assert_eq!(back, random_game(4, 6, 1).unwrap());
    let out = mmr(&["convert", &src, "--to", "json"]);
    assert_eq!(out.stdout, fs::read(&src).unwrap());
}

#[test]
fn reference_nfg_orders_row_player_fastest() {
    // Row strategy 1 ends the game with payoffs (1, 1) whatever the column
    // player does.
    let g = parse_nfg(&fs::read_to_string(data("e02.nfg")).unwrap()).unwrap();
    assert_eq!(g.row_matrix().to_rows(), vec![vec![1.0, 1.0], vec![0.0, 0.0], vec![0.0, 2.0]]);
    assert_eq!(g.col_matrix().to_rows(), vec![vec![1.0, 1.0], vec![2.0, 3.0], vec![2.0, 0.0]]);
}
