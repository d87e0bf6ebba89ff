//! Command-line front end: matrix generation, single decodes with traces,
//! Monte Carlo runs, budget sweeps, decay fits and brute-force oracle
//! checks.
//!
//! Exit codes: 0 on success, 2 when a requested decode fails, 1 for any
//! operational error. Every subcommand takes `--seed`; there is no silent
//! time-based seeding anywhere.

mod kv;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use verisparse::decoder::DecoderState;
use verisparse::graph::MeasurementGraph;
use verisparse::harness::{
    self, conditional_unidentified_stats, estimate_failure_probability, sweep_incremental,
    ExperimentConfig, MatrixMode,
};
use verisparse::incremental::{
    run_incremental_on_state, IncrementalConfig, IncrementalOutcome, TriggerPolicy,
};
use verisparse::oracle::enumerate_coset_leaders;
use verisparse::seed::trial_rng;
use verisparse::signal::{generate_gaussian_sparse, measure, MeasurementVector};
use verisparse::stats::fit_decay;

use kv::KvConfig;

#[derive(Parser)]
#[command(
    name = "verisparse",
    version,
    about = "Sparse-signal recovery by verification decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a 4-cycle-free variable-regular measurement matrix (alist).
    GenMatrix(GenMatrixArgs),
    /// Decode one generated signal, optionally with incremental samples.
    Decode(DecodeArgs),
    /// Estimate the base failure probability over many trials.
    Mc(McArgs),
    /// Failure probability against the incremental sample budget.
    Sweep(SweepArgs),
    /// Conditional unidentified-count statistics over decoding failures.
    Stats(StatsArgs),
    /// Fit the decay rule p(L) = p0 * alpha^L to a curve file.
    Fit(FitArgs),
    /// Brute-force minimum-weight solutions on a tiny instance.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed; required (flag or config file).
    #[arg(long)]
    seed: Option<u64>,
    /// key=value file supplying defaults for omitted flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenMatrixArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Signal length (variables / columns).
    #[arg(long)]
    n: Option<usize>,
    /// Measurement count (checks / rows).
    #[arg(long)]
    m: Option<usize>,
    /// Variable degree (column weight).
    #[arg(long)]
    deg: Option<usize>,
    /// Output alist path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_attempts: Option<usize>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Measurement matrix (alist file).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Sparsity of the generated signal.
    #[arg(long)]
    k: Option<usize>,
    /// Incremental sample budget.
    #[arg(long)]
    lmax: Option<usize>,
    /// "on-stall" or "kappa0=N" (sample once the iteration count exceeds N).
    #[arg(long)]
    trigger: Option<String>,
    #[arg(long)]
    eps_zero: Option<f64>,
    #[arg(long)]
    eps_eq: Option<f64>,
    /// Write the verification event log here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Optional output prefix for the report row and summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    deg: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output prefix; files get _trials.csv, _curve.csv, _summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// "fresh" (new matrix per trial) or "fixed".
    #[arg(long)]
    matrix_mode: Option<String>,
    #[arg(long)]
    matrix_seed: Option<u64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    /// Worker threads; 0 means the rayon default. Defaults from
    /// VERISPARSE_WORKERS. Output bytes never depend on this.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    eps_zero: Option<f64>,
    #[arg(long)]
    eps_eq: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    mc: McArgs,
    /// Comma-separated budgets, e.g. "0,1,2,5,10".
    #[arg(long)]
    l_values: Option<String>,
    /// Shorthand for 0..=lmax.
    #[arg(long)]
    lmax: Option<usize>,
    /// "on-stall" or "kappa0=N" (sample once the iteration count exceeds N).
    #[arg(long)]
    trigger: Option<String>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    deg: Option<usize>,
    /// Comma-separated sparsity values.
    #[arg(long)]
    k_values: Option<String>,
    /// Failures to accumulate per K before stopping.
    #[arg(long)]
    failure_target: Option<usize>,
    /// Trial cap per K.
    #[arg(long)]
    trial_budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    matrix_mode: Option<String>,
    #[arg(long)]
    matrix_seed: Option<u64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Curve CSV produced by mc or sweep.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Comma-separated measurement values, one per check.
    #[arg(long)]
    s: Option<String>,
    /// Largest support size to enumerate.
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::GenMatrix(a) => cmd_gen_matrix(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

fn default_workers() -> usize {
    std::env::var("VERISPARSE_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn parse_trigger(raw: &str) -> Result<TriggerPolicy> {
    if raw == "on-stall" {
        return Ok(TriggerPolicy::OnStall);
    }
    if let Some(v) = raw.strip_prefix("kappa0=") {
        let kappa0 = v
            .parse()
            .map_err(|_| anyhow!("bad iteration threshold in trigger {raw:?}"))?;
        return Ok(TriggerPolicy::IterationThreshold(kappa0));
    }
    bail!("trigger must be \"on-stall\" or \"kappa0=<iterations>\", found {raw:?}")
}

fn parse_matrix_mode(raw: &str) -> Result<MatrixMode> {
    match raw {
        "fresh" => Ok(MatrixMode::FreshPerTrial),
        "fixed" => Ok(MatrixMode::Fixed),
        _ => bail!("matrix mode must be \"fresh\" or \"fixed\", found {raw:?}"),
    }
}

fn parse_usize_list(raw: &str, what: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| anyhow!("bad {what} entry {t:?}"))
        })
        .collect()
}

fn load_matrix(path: &Path) -> Result<MeasurementGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read matrix file {}", path.display()))?;
    MeasurementGraph::from_alist(&text)
        .with_context(|| format!("cannot parse matrix file {}", path.display()))
}

/// The name every sibling CSV uses to point at the run's manifest.
fn manifest_ref(prefix: &Path) -> String {
    format!(
        "{}_summary.json",
        prefix
            .file_name()
            .map(|s| s.to_string_lossy())
            .unwrap_or_default()
    )
}

fn sibling(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(suffix);
    prefix.with_file_name(name)
}

/// Writes the data files plus the `<prefix>_summary.json` manifest that the
/// data files reference.
fn write_run(
    prefix: &Path,
    subcommand: &str,
    master_seed: u64,
    config: serde_json::Value,
    results: serde_json::Value,
    files: &[(&str, String)],
) -> Result<()> {
    if let Some(dir) = prefix.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        }
    }
    let mut outputs = Vec::new();
    for (suffix, content) in files {
        let path = sibling(prefix, suffix);
        std::fs::write(&path, content)
            .with_context(|| format!("cannot write {}", path.display()))?;
        outputs.push(
            path.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        );
    }
    let manifest = json!({
        "tool": "verisparse",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "master_seed": master_seed,
        "config": config,
        "outputs": outputs,
        "results": results,
    });
    let path = sibling(prefix, "_summary.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

struct McSettings {
    cfg: ExperimentConfig,
    workers: usize,
    out: PathBuf,
}

impl McArgs {
    fn resolve(self) -> Result<McSettings> {
        let kv = KvConfig::load(self.common.config.as_deref())?;
        let n = kv.resolve(self.n, "n", None)?;
        let m = kv.resolve(self.m, "m", None)?;
        let deg = kv.resolve(self.deg, "deg", None)?;
        let k = kv.resolve(self.k, "k", None)?;
        let trials = kv.resolve(self.trials, "trials", None)?;
        let seed = kv.resolve(self.common.seed, "seed", None)?;
        let out: PathBuf = kv.resolve(self.out, "out", None)?;
        let mode = parse_matrix_mode(&kv.resolve(
            self.matrix_mode,
            "matrix-mode",
            Some("fresh".to_string()),
        )?)?;
        let mut cfg = ExperimentConfig::new(n, m, deg, k)
            .with_trials(trials)
            .with_seed(seed)
            .with_matrix_mode(mode);
        cfg.matrix_seed = kv.resolve(self.matrix_seed, "matrix-seed", Some(0))?;
        cfg.max_attempts = kv.resolve(self.max_attempts, "max-attempts", Some(64))?;
        cfg.eps_zero = kv.resolve(
            self.eps_zero,
            "eps-zero",
            Some(verisparse::decoder::DEFAULT_EPS_ZERO),
        )?;
        cfg.eps_eq = kv.resolve(
            self.eps_eq,
            "eps-eq",
            Some(verisparse::decoder::DEFAULT_EPS_EQ),
        )?;
        let workers = kv.resolve(self.workers, "workers", Some(default_workers()))?;
        Ok(McSettings { cfg, workers, out })
    }
}

fn config_json(
    cfg: &ExperimentConfig,
    extra: &[(&str, serde_json::Value)],
) -> Result<serde_json::Value> {
    let mut value = serde_json::to_value(cfg)?;
    let map = value
        .as_object_mut()
        .expect("config serializes to an object");
    for (k, v) in extra {
        map.insert((*k).to_string(), v.clone());
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

fn cmd_gen_matrix(args: GenMatrixArgs) -> Result<u8> {
    let kv = KvConfig::load(args.common.config.as_deref())?;
    let n = kv.resolve(args.n, "n", None)?;
    let m = kv.resolve(args.m, "m", None)?;
    let deg = kv.resolve(args.deg, "deg", None)?;
    let seed = kv.resolve(args.common.seed, "seed", None)?;
    let out: PathBuf = kv.resolve(args.out, "out", None)?;
    let max_attempts = kv.resolve(args.max_attempts, "max-attempts", Some(64))?;

    let g = MeasurementGraph::build_regular(n, m, deg, seed, max_attempts)?;
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(&out, g.to_alist())
        .with_context(|| format!("cannot write {}", out.display()))?;
    let check_degs: Vec<usize> = (0..m).map(|c| g.check_degree(c).unwrap()).collect();
    println!(
        "wrote {}: {}x{} edges={} girth>=6: {} var_degree={} check_degree={}..{}",
        out.display(),
        m,
        n,
        g.edge_count(),
        g.girth_at_least_six(),
        deg,
        check_degs.iter().min().unwrap(),
        check_degs.iter().max().unwrap()
    );
    Ok(0)
}

fn cmd_decode(args: DecodeArgs) -> Result<u8> {
    let kv = KvConfig::load(args.common.config.as_deref())?;
    let matrix: PathBuf = kv.resolve(args.matrix, "matrix", None)?;
    let k = kv.resolve(args.k, "k", None)?;
    let seed = kv.resolve(args.common.seed, "seed", None)?;
    let lmax = kv.resolve(args.lmax, "lmax", Some(0))?;
    let trigger =
        parse_trigger(&kv.resolve(args.trigger, "trigger", Some("on-stall".to_string()))?)?;
    let eps_zero = kv.resolve(
        args.eps_zero,
        "eps-zero",
        Some(verisparse::decoder::DEFAULT_EPS_ZERO),
    )?;
    let eps_eq = kv.resolve(
        args.eps_eq,
        "eps-eq",
        Some(verisparse::decoder::DEFAULT_EPS_EQ),
    )?;

    let g = load_matrix(&matrix)?;
    let mut rng = trial_rng(seed, 0);
    let e = generate_gaussian_sparse(g.n_vars(), k, &mut rng)?;
    let s = measure(&g, &e)?;
    let cfg = IncrementalConfig {
        trigger,
        iota_max: lmax,
        max_iterations: g.n_vars(),
        eps_zero,
        eps_eq,
    };
    let mut state = DecoderState::init(&g, &s, eps_zero, eps_eq)?;
    state.record_events(args.trace.is_some());
    let report = run_incremental_on_state(&mut state, &e, &cfg, &mut rng)?;

    println!(
        "outcome={} samples_used={} iterations={} unidentified_at_first_stall={} unidentified={}",
        report.outcome.as_str(),
        report.samples_used,
        report.iterations_used,
        report.unidentified_at_first_stall,
        state.unidentified_count()
    );
    if let Some(trace) = &args.trace {
        std::fs::write(trace, state.events_to_csv())
            .with_context(|| format!("cannot write {}", trace.display()))?;
    }
    if let Some(out) = &args.out {
        let mref = manifest_ref(out);
        let mut row = format!("# manifest: {mref}\n");
        row.push_str("outcome,L,k,unidentified_at_first_stall\n");
        row.push_str(&report.to_csv_row());
        row.push('\n');
        let config = json!({
            "matrix": matrix.display().to_string(),
            "k": k,
            "lmax": lmax,
            "trigger": trigger,
            "eps_zero": eps_zero,
            "eps_eq": eps_eq,
        });
        let results = json!({
            "outcome": report.outcome.as_str(),
            "samples_used": report.samples_used,
            "iterations_used": report.iterations_used,
            "unidentified_at_first_stall": report.unidentified_at_first_stall,
        });
        write_run(
            out,
            "decode",
            seed,
            config,
            results,
            &[("_report.csv", row)],
        )?;
    }
    Ok(if report.outcome == IncrementalOutcome::Success {
        0
    } else {
        2
    })
}

fn cmd_mc(args: McArgs) -> Result<u8> {
    let st = args.resolve()?;
    let out = estimate_failure_probability(&st.cfg, st.workers)?;
    let mref = manifest_ref(&st.out);
    let trials_text = harness::trials_csv(&out.records, &mref);
    let curve = harness::FailureCurve {
        points: vec![out.point],
    };
    let curve_text = harness::curve_csv(&curve, &mref);
    let p = out.point;
    println!(
        "p_hat={} failures={} trials={} ci95=[{}, {}]",
        p.p_hat, p.failures, p.trials, p.ci_low, p.ci_high
    );
    write_run(
        &st.out,
        "mc",
        st.cfg.master_seed,
        config_json(&st.cfg, &[])?,
        serde_json::to_value(p)?,
        &[("_trials.csv", trials_text), ("_curve.csv", curve_text)],
    )?;
    Ok(0)
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let l_values_raw = args.l_values.clone();
    let lmax = args.lmax;
    let trigger_raw = args.trigger.clone();
    let mut st = args.mc.resolve()?;
    if let Some(raw) = trigger_raw {
        st.cfg.trigger = parse_trigger(&raw)?;
    }
    let l_values = match (l_values_raw, lmax) {
        (Some(raw), None) => parse_usize_list(&raw, "L")?,
        (None, Some(lmax)) => (0..=lmax).collect(),
        (None, None) => bail!("sweep needs --l-values or --lmax"),
        (Some(_), Some(_)) => bail!("--l-values and --lmax are mutually exclusive"),
    };
    let out = sweep_incremental(&st.cfg, &l_values, st.workers)?;
    let mref = manifest_ref(&st.out);
    let trials_text = harness::trials_csv(&out.records, &mref);
    let curve_text = harness::curve_csv(&out.curve, &mref);
    for p in &out.curve.points {
        println!(
            "L={} p_hat={} failures={}/{}",
            p.l, p.p_hat, p.failures, p.trials
        );
    }
    let fit = match fit_decay(&out.curve) {
        Ok(fit) => {
            println!(
                "fit: p0={} alpha={} rms_log_residual={} points_used={}",
                fit.p0, fit.alpha, fit.rms_log_residual, fit.points_used
            );
            Some(fit)
        }
        Err(e) => {
            eprintln!("warning: decay fit unavailable: {e}");
            None
        }
    };
    let results = json!({
        "curve": out.curve,
        "decay_fit": fit,
    });
    write_run(
        &st.out,
        "sweep",
        st.cfg.master_seed,
        config_json(&st.cfg, &[("l_values", serde_json::to_value(&l_values)?)])?,
        results,
        &[("_trials.csv", trials_text), ("_curve.csv", curve_text)],
    )?;
    Ok(0)
}

fn cmd_stats(args: StatsArgs) -> Result<u8> {
    let kv = KvConfig::load(args.common.config.as_deref())?;
    let n = kv.resolve(args.n, "n", None)?;
    let m = kv.resolve(args.m, "m", None)?;
    let deg = kv.resolve(args.deg, "deg", None)?;
    let seed = kv.resolve(args.common.seed, "seed", None)?;
    let out: PathBuf = kv.resolve(args.out, "out", None)?;
    let k_values = parse_usize_list(&kv.resolve(args.k_values, "k-values", None)?, "K")?;
    let failure_target = kv.resolve(args.failure_target, "failure-target", Some(1000))?;
    let trial_budget = kv.resolve(args.trial_budget, "trial-budget", Some(100_000))?;
    let workers = kv.resolve(args.workers, "workers", Some(default_workers()))?;
    let mode = parse_matrix_mode(&kv.resolve(
        args.matrix_mode,
        "matrix-mode",
        Some("fresh".to_string()),
    )?)?;

    let mut cfg = ExperimentConfig::new(n, m, deg, 0)
        .with_seed(seed)
        .with_matrix_mode(mode);
    cfg.matrix_seed = kv.resolve(args.matrix_seed, "matrix-seed", Some(0))?;
    cfg.max_attempts = kv.resolve(args.max_attempts, "max-attempts", Some(64))?;
    cfg.trials = trial_budget;

    let stats =
        conditional_unidentified_stats(&cfg, &k_values, failure_target, trial_budget, workers)?;
    for s in &stats {
        println!(
            "K={} failures={} trials={} mean_ratio={} median_ratio={} p90_ratio={}",
            s.sparsity, s.failures, s.trials_run, s.mean_ratio, s.median_ratio, s.p90_ratio
        );
        if s.insufficient {
            eprintln!(
                "warning: K={}: only {} failures within the {}-trial budget (target {})",
                s.sparsity, s.failures, s.trials_run, failure_target
            );
        }
    }
    let mref = manifest_ref(&out);
    let stats_text = harness::stats_csv(&stats, &mref);
    let config = config_json(
        &cfg,
        &[
            ("k_values", serde_json::to_value(&k_values)?),
            ("failure_target", json!(failure_target)),
            ("trial_budget", json!(trial_budget)),
        ],
    )?;
    write_run(
        &out,
        "stats",
        seed,
        config,
        serde_json::to_value(&stats)?,
        &[("_stats.csv", stats_text)],
    )?;
    Ok(0)
}

fn cmd_fit(args: FitArgs) -> Result<u8> {
    let kv = KvConfig::load(args.common.config.as_deref())?;
    let curve_path: PathBuf = kv.resolve(args.curve, "curve", None)?;
    let seed = kv.resolve(args.common.seed, "seed", None)?;
    let out: PathBuf = kv.resolve(args.out, "out", None)?;

    let text = std::fs::read_to_string(&curve_path)
        .with_context(|| format!("cannot read curve file {}", curve_path.display()))?;
    let curve = harness::parse_curve_csv(&text)?;
    let fit = fit_decay(&curve)?;
    println!(
        "p0={} alpha={} rms_log_residual={} points_used={}",
        fit.p0, fit.alpha, fit.rms_log_residual, fit.points_used
    );
    write_run(
        &out,
        "fit",
        seed,
        json!({ "curve": curve_path.display().to_string() }),
        serde_json::to_value(fit)?,
        &[],
    )?;
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let kv = KvConfig::load(args.common.config.as_deref())?;
    let matrix: PathBuf = kv.resolve(args.matrix, "matrix", None)?;
    let s_raw: String = kv.resolve(args.s, "s", None)?;
    let seed = kv.resolve(args.common.seed, "seed", None)?;
    let out: PathBuf = kv.resolve(args.out, "out", None)?;
    let tol = kv.resolve(args.tol, "tol", Some(1e-9))?;

    let g = load_matrix(&matrix)?;
    let k_max = kv.resolve(args.k_max, "k-max", Some(g.n_vars()))?;
    let values: Vec<f64> = s_raw
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| anyhow!("bad measurement entry {t:?}"))
        })
        .collect::<Result<_>>()?;
    let s = MeasurementVector::new(values);
    let result = enumerate_coset_leaders(&g, &s, k_max, tol)?;
    let leaders: Vec<serde_json::Value> = result
        .leaders
        .iter()
        .map(|l| {
            json!({
                "support": l.support(),
                "values": l.values(),
            })
        })
        .collect();
    let results = json!({
        "min_weight": result.min_weight,
        "unique": result.unique,
        "leaders": leaders,
    });
    println!("{}", serde_json::to_string_pretty(&results)?);
    let config = json!({
        "matrix": matrix.display().to_string(),
        "s": s.as_slice(),
        "k_max": k_max,
        "tol": tol,
    });
    write_run(&out, "oracle", seed, config, results, &[])?;
    Ok(0)
}
