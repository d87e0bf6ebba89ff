//! End-to-end checks of the command-line interface: exit codes, file
//! formats, seed handling and byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use verisparse::graph::MeasurementGraph;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_verisparse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("verisparse_cli_{name}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gen_matrix(dir: &Path, n: usize, m: usize, deg: usize, seed: u64) -> PathBuf {
    let path = dir.join("h.alist");
    let out = run(&[
        "gen-matrix",
        "--n",
        &n.to_string(),
        "--m",
        &m.to_string(),
        "--deg",
        &deg.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "gen-matrix failed: {}", stderr(&out));
    path
}

#[test]
fn gen_matrix_writes_valid_alist() {
    let dir = workdir("gen");
    let path = gen_matrix(&dir, 40, 24, 3, 7);
    let g = MeasurementGraph::from_alist(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g.n_vars(), 40);
    assert_eq!(g.n_checks(), 24);
    assert!(g.girth_at_least_six());
}

#[test]
fn gen_matrix_usage_errors() {
    let dir = workdir("gen_err");
    let out = run(&[
        "gen-matrix",
        "--n",
        "10",
        "--m",
        "5",
        "--deg",
        "0",
        "--seed",
        "1",
        "--out",
        dir.join("x.alist").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("degree"));
}

#[test]
fn seed_is_mandatory() {
    let dir = workdir("noseed");
    let out = run(&[
        "mc",
        "--n",
        "20",
        "--m",
        "12",
        "--deg",
        "2",
        "--k",
        "2",
        "--trials",
        "5",
        "--out",
        dir.join("mc").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("seed"));
}

#[test]
fn decode_exit_codes() {
    let dir = workdir("decode");
    let path = gen_matrix(&dir, 40, 24, 3, 7);
    let matrix = path.to_str().unwrap();

    let ok = run(&["decode", "--matrix", matrix, "--k", "0", "--seed", "3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("outcome=success"));
    assert!(stdout(&ok).contains("samples_used=0"));

    // saturated instance with no sample budget fails with exit 2
    let fail = run(&["decode", "--matrix", matrix, "--k", "20", "--seed", "3"]);
    assert_eq!(fail.status.code(), Some(2));

    // a budget turns the same instance into a success with L >= 1
    let inc = run(&[
        "decode", "--matrix", matrix, "--k", "20", "--seed", "3", "--lmax", "40",
    ]);
    assert_eq!(inc.status.code(), Some(0));
    let text = stdout(&inc);
    let l: usize = text
        .split("samples_used=")
        .nth(1)
        .and_then(|t| t.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(l >= 1, "expected at least one sample, got {text}");

    let missing = run(&[
        "decode",
        "--matrix",
        "nope.alist",
        "--k",
        "1",
        "--seed",
        "3",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("nope.alist"));
}

#[test]
fn decode_trace_lists_rules() {
    let dir = workdir("trace");
    let path = gen_matrix(&dir, 40, 24, 3, 7);
    let trace = dir.join("trace.csv");
    let out = run(&[
        "decode",
        "--matrix",
        path.to_str().unwrap(),
        "--k",
        "20",
        "--seed",
        "3",
        "--lmax",
        "40",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("iteration,rule,variable,value\n"));
    assert!(text.contains(",sample,"));
}

#[test]
fn mc_zero_sparsity_reports_zero_failures() {
    let dir = workdir("mc0");
    let prefix = dir.join("mc");
    let out = run(&[
        "mc",
        "--n",
        "40",
        "--m",
        "24",
        "--deg",
        "3",
        "--k",
        "0",
        "--trials",
        "100",
        "--seed",
        "9",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let curve = std::fs::read_to_string(dir.join("mc_curve.csv")).unwrap();
    assert!(curve.starts_with("# manifest: mc_summary.json\n"));
    assert!(curve.contains("\n0,0,100,0,0,"));
    let trials = std::fs::read_to_string(dir.join("mc_trials.csv")).unwrap();
    assert_eq!(trials.matches("success").count(), 100);
    let summary = std::fs::read_to_string(dir.join("mc_summary.json")).unwrap();
    assert!(summary.contains("\"subcommand\": \"mc\""));
    assert!(summary.contains("\"master_seed\": 9"));
}

#[test]
fn sweep_then_fit_recovers_decay() {
    let dir = workdir("fit");
    // exact geometric curve, bypassing simulation
    let mut curve = String::from("L,failures,trials,p_hat,ci_low,ci_high\n");
    for l in 0..=6 {
        let p = 0.1 * 0.5f64.powi(l);
        curve.push_str(&format!("{l},1,1000,{p},0,1\n"));
    }
    let curve_path = dir.join("curve.csv");
    std::fs::write(&curve_path, curve).unwrap();
    let out = run(&[
        "fit",
        "--curve",
        curve_path.to_str().unwrap(),
        "--seed",
        "0",
        "--out",
        dir.join("fit").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let grab = |key: &str| -> f64 {
        text.split(&format!("{key}="))
            .nth(1)
            .and_then(|t| t.split_whitespace().next())
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((grab("alpha") - 0.5).abs() < 1e-9, "{text}");
    assert!((grab("p0") - 0.1).abs() < 1e-9, "{text}");
    assert!(std::fs::read_to_string(dir.join("fit_summary.json"))
        .unwrap()
        .contains("\"alpha\""));
}

#[test]
fn sweep_writes_monotone_curve_and_fit() {
    let dir = workdir("sweep");
    let out = run(&[
        "sweep",
        "--n",
        "100",
        "--m",
        "44",
        "--deg",
        "3",
        "--k",
        "28",
        "--trials",
        "400",
        "--seed",
        "5",
        "--lmax",
        "6",
        "--out",
        dir.join("sw").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let curve = std::fs::read_to_string(dir.join("sw_curve.csv")).unwrap();
    let ps: Vec<f64> = curve
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ps.len(), 7);
    assert!(ps.windows(2).all(|w| w[0] >= w[1]), "{ps:?}");
    let summary = std::fs::read_to_string(dir.join("sw_summary.json")).unwrap();
    assert!(summary.contains("\"l_values\""));
}

#[test]
fn oracle_reports_nonunique_leaders() {
    let dir = workdir("oracle");
    // two identical columns attached to the single check
    let alist = "2 1\n1 2\n1 1\n2\n1\n1\n1 2\n";
    let path = dir.join("dup.alist");
    std::fs::write(&path, alist).unwrap();
    let out = run(&[
        "oracle",
        "--matrix",
        path.to_str().unwrap(),
        "--s",
        "1.0",
        "--k-max",
        "1",
        "--seed",
        "0",
        "--out",
        dir.join("or").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["unique"], serde_json::Value::Bool(false));
    assert_eq!(json["min_weight"], serde_json::json!(1));
    assert_eq!(json["leaders"].as_array().unwrap().len(), 2);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir_a = workdir("det_a");
    let dir_b = workdir("det_b");
    for (dir, workers) in [(&dir_a, "1"), (&dir_b, "2")] {
        let out = run(&[
            "sweep",
            "--n",
            "100",
            "--m",
            "44",
            "--deg",
            "3",
            "--k",
            "28",
            "--trials",
            "200",
            "--seed",
            "5",
            "--lmax",
            "4",
            "--workers",
            workers,
            "--out",
            dir.join("run").to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["run_trials.csv", "run_curve.csv", "run_summary.json"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between worker counts");
    }
}

#[test]
fn worker_env_var_sets_default_without_changing_bytes() {
    let dir_a = workdir("env_a");
    let dir_b = workdir("env_b");
    for (dir, env_workers) in [(&dir_a, "1"), (&dir_b, "2")] {
        let out = bin()
            .env("VERISPARSE_WORKERS", env_workers)
            .args([
                "mc", "--n", "40", "--m", "24", "--deg", "3", "--k", "8", "--trials", "60",
                "--seed", "11", "--out",
            ])
            .arg(dir.join("run"))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for name in ["run_trials.csv", "run_curve.csv", "run_summary.json"] {
        assert_eq!(
            std::fs::read(dir_a.join(name)).unwrap(),
            std::fs::read(dir_b.join(name)).unwrap(),
            "{name} depends on VERISPARSE_WORKERS"
        );
    }
}

#[test]
fn config_file_supplies_defaults_flags_override() {
    let dir = workdir("config");
    let cfg_path = dir.join("run.conf");
    std::fs::write(
        &cfg_path,
        "n=40\nm=24\ndeg=3\nk=0\ntrials=50\nseed=4\nout=UNUSED\n",
    )
    .unwrap();
    let prefix = dir.join("mc");
    let out = run(&[
        "mc",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
        "--trials",
        "25",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let curve = std::fs::read_to_string(dir.join("mc_curve.csv")).unwrap();
    // flag beat the config file's trial count; seed came from the file
    assert!(curve.contains("\n0,0,25,"), "{curve}");
    let summary = std::fs::read_to_string(dir.join("mc_summary.json")).unwrap();
    assert!(summary.contains("\"master_seed\": 4"));
}

#[test]
fn stats_command_reports_conditional_ratios() {
    let dir = workdir("stats");
    let out = run(&[
        "stats",
        "--n",
        "48",
        "--m",
        "24",
        "--deg",
        "3",
        "--k-values",
        "0,24",
        "--failure-target",
        "20",
        "--trial-budget",
        "400",
        "--seed",
        "2",
        "--out",
        dir.join("st").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    // the impossible K=0 row triggers a warning, not a crash
    assert!(stderr(&out).contains("warning"));
    let csv = std::fs::read_to_string(dir.join("st_stats.csv")).unwrap();
    assert!(csv.starts_with("# manifest: st_summary.json\n"));
    assert!(csv.lines().count() >= 4);
    assert!(csv.contains("\n0,NaN,NaN,NaN,0"));
}
