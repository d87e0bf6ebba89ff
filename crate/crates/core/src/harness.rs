//! Monte Carlo harness: failure-probability estimation, conditional
//! unidentified-count statistics, and incremental-budget sweeps.
//!
//! Every trial derives its random stream from `(master_seed, trial_index)`,
//! so results are bit-identical across runs and across worker counts. A
//! sweep runs each trial once at the largest budget and reads the smaller
//! budgets off the same record: a trial that succeeded with `s` samples
//! succeeds at every budget of at least `s` and fails below, which is
//! exactly the common-random-numbers curve.

use std::time::Instant;

use rand::RngCore;
use thiserror::Error;

use crate::decoder::DecoderState;
use crate::graph::{GraphError, MeasurementGraph};
use crate::incremental::{
    run_incremental_with_state, IncrementalConfig, IncrementalError, IncrementalOutcome,
    TriggerPolicy,
};
use crate::seed;
use crate::signal::{generate_gaussian_sparse, measure, SignalError, SparseSignal};
use crate::stats::wilson95;

/// Verified values further than this from the ground truth count as false
/// verifications.
pub const FALSE_VERIFICATION_TOL: f64 = 1e-6;

/// Trial window between early-stop checks in the conditional statistics;
/// fixed so the stopping point does not depend on the worker count.
const STATS_BATCH: usize = 256;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Incremental(#[from] IncrementalError),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixMode {
    /// A new seeded matrix per trial: ensemble-averaged results.
    FreshPerTrial,
    /// One matrix, built from `matrix_seed`, shared by all trials.
    Fixed,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ExperimentConfig {
    pub n_vars: usize,
    pub n_checks: usize,
    pub var_degree: usize,
    /// Nonzero count K of each trial signal.
    pub sparsity: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub matrix_mode: MatrixMode,
    /// Seed of the shared matrix in `Fixed` mode.
    pub matrix_seed: u64,
    pub max_attempts: usize,
    pub trigger: TriggerPolicy,
    /// Direct-sample budget; 0 disables sampling.
    pub iota_max: usize,
    pub eps_zero: f64,
    pub eps_eq: f64,
    /// Iteration cap; defaults to the signal length.
    pub max_iterations: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(n_vars: usize, n_checks: usize, var_degree: usize, sparsity: usize) -> Self {
        ExperimentConfig {
            n_vars,
            n_checks,
            var_degree,
            sparsity,
            trials: 1,
            master_seed: 0,
            matrix_mode: MatrixMode::FreshPerTrial,
            matrix_seed: 0,
            max_attempts: 64,
            trigger: TriggerPolicy::OnStall,
            iota_max: 0,
            eps_zero: crate::decoder::DEFAULT_EPS_ZERO,
            eps_eq: crate::decoder::DEFAULT_EPS_EQ,
            max_iterations: None,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_budget(mut self, iota_max: usize) -> Self {
        self.iota_max = iota_max;
        self
    }

    pub fn with_matrix_mode(mut self, mode: MatrixMode) -> Self {
        self.matrix_mode = mode;
        self
    }

    pub fn with_sparsity(mut self, sparsity: usize) -> Self {
        self.sparsity = sparsity;
        self
    }

    fn incremental(&self) -> IncrementalConfig {
        IncrementalConfig {
            trigger: self.trigger,
            iota_max: self.iota_max,
            max_iterations: self.max_iterations.unwrap_or(self.n_vars),
            eps_zero: self.eps_zero,
            eps_eq: self.eps_eq,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::InvalidConfig("trials must be >= 1".into()));
        }
        if self.sparsity > self.n_vars {
            return Err(HarnessError::InvalidConfig(format!(
                "sparsity {} exceeds signal length {}",
                self.sparsity, self.n_vars
            )));
        }
        Ok(())
    }
}

/// One decoded trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub outcome: IncrementalOutcome,
    pub samples_used: usize,
    pub unidentified_at_first_stall: usize,
    /// Some verified value disagreed with the ground truth.
    pub false_verification: bool,
    /// Not written to CSV; CSV bytes must not depend on machine speed.
    pub wall_time_secs: f64,
}

impl TrialRecord {
    pub fn is_success(&self) -> bool {
        self.outcome == IncrementalOutcome::Success
    }

    /// Success within a sample budget of `l`.
    pub fn success_within(&self, l: usize) -> bool {
        self.is_success() && self.samples_used <= l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurvePoint {
    pub l: usize,
    pub failures: usize,
    pub trials: usize,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FailureCurve {
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionalStat {
    pub sparsity: usize,
    pub trials_run: usize,
    pub failures: usize,
    /// Mean, median and 90th percentile of |V_U|/K over the failures; NaN
    /// when no failure was observed.
    pub mean_ratio: f64,
    pub median_ratio: f64,
    pub p90_ratio: f64,
    /// The trial budget ran out before reaching the failure target.
    pub insufficient: bool,
}

#[derive(Debug, Clone)]
pub struct McOutput {
    pub point: CurvePoint,
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub curve: FailureCurve,
    /// Per-trial records at the largest budget.
    pub records: Vec<TrialRecord>,
}

fn curve_point(l: usize, failures: usize, trials: usize) -> CurvePoint {
    let (ci_low, ci_high) = wilson95(failures, trials);
    CurvePoint {
        l,
        failures,
        trials,
        p_hat: failures as f64 / trials as f64,
        ci_low,
        ci_high,
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    fixed: Option<&MeasurementGraph>,
    trial_index: usize,
) -> Result<TrialRecord, HarnessError> {
    let start = Instant::now();
    let mut rng = seed::trial_rng(cfg.master_seed, trial_index as u64);
    let built;
    let graph = match fixed {
        Some(g) => g,
        None => {
            let graph_seed = rng.next_u64();
            built = MeasurementGraph::build_regular(
                cfg.n_vars,
                cfg.n_checks,
                cfg.var_degree,
                graph_seed,
                cfg.max_attempts,
            )?;
            &built
        }
    };
    let e = generate_gaussian_sparse(cfg.n_vars, cfg.sparsity, &mut rng)?;
    let s = measure(graph, &e)?;
    let (report, state) = run_incremental_with_state(graph, &s, &e, &cfg.incremental(), &mut rng)?;
    let false_verification = has_false_verification(&state, &e);
    Ok(TrialRecord {
        trial_index,
        outcome: report.outcome,
        samples_used: report.samples_used,
        unidentified_at_first_stall: report.unidentified_at_first_stall,
        false_verification,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn has_false_verification(state: &DecoderState<'_>, truth: &SparseSignal) -> bool {
    (0..truth.length()).any(|n| match state.identified_value(n) {
        Some(v) => (v - truth.value_at(n)).abs() > FALSE_VERIFICATION_TOL,
        None => false,
    })
}

/// Runs `range` trials in index order; `workers = 0` uses the ambient rayon
/// pool, anything else gets a dedicated pool of that size. The output is
/// independent of the worker count.
fn run_trial_range(
    cfg: &ExperimentConfig,
    fixed: Option<&MeasurementGraph>,
    range: std::ops::Range<usize>,
    workers: usize,
) -> Result<Vec<TrialRecord>, HarnessError> {
    use rayon::prelude::*;
    let body = || {
        range
            .clone()
            .into_par_iter()
            .map(|i| run_trial(cfg, fixed, i))
            .collect::<Result<Vec<_>, _>>()
    };
    if workers == 0 {
        body()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?;
        pool.install(body)
    }
}

fn build_fixed(cfg: &ExperimentConfig) -> Result<Option<MeasurementGraph>, HarnessError> {
    match cfg.matrix_mode {
        MatrixMode::FreshPerTrial => Ok(None),
        MatrixMode::Fixed => Ok(Some(MeasurementGraph::build_regular(
            cfg.n_vars,
            cfg.n_checks,
            cfg.var_degree,
            cfg.matrix_seed,
            cfg.max_attempts,
        )?)),
    }
}

/// Base failure-probability estimate: `cfg.trials` independent trials with
/// sampling disabled; failure means any outcome other than success.
pub fn estimate_failure_probability(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<McOutput, HarnessError> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    cfg.iota_max = 0;
    let fixed = build_fixed(&cfg)?;
    let records = run_trial_range(&cfg, fixed.as_ref(), 0..cfg.trials, workers)?;
    let failures = records.iter().filter(|r| !r.is_success()).count();
    Ok(McOutput {
        point: curve_point(0, failures, records.len()),
        records,
    })
}

/// Failure probability against the sample budget, on common random numbers:
/// one decode per trial at the largest budget, then each requested `L` is
/// read off the per-trial sample counts.
pub fn sweep_incremental(
    cfg: &ExperimentConfig,
    l_values: &[usize],
    workers: usize,
) -> Result<SweepOutput, HarnessError> {
    cfg.validate()?;
    if l_values.is_empty() {
        return Err(HarnessError::InvalidConfig("no L values given".into()));
    }
    if l_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(HarnessError::InvalidConfig(
            "L values must be nondecreasing".into(),
        ));
    }
    let mut run_cfg = cfg.clone();
    run_cfg.iota_max = *l_values.last().unwrap();
    let fixed = build_fixed(&run_cfg)?;
    let records = run_trial_range(&run_cfg, fixed.as_ref(), 0..run_cfg.trials, workers)?;
    let points = l_values
        .iter()
        .map(|&l| {
            let failures = records.iter().filter(|r| !r.success_within(l)).count();
            curve_point(l, failures, records.len())
        })
        .collect();
    Ok(SweepOutput {
        curve: FailureCurve { points },
        records,
    })
}

/// Distribution of |V_U|/K over decoding failures, per sparsity value.
///
/// Sampling stays disabled. For each K, trials accumulate in fixed windows
/// until at least `failure_target` failures are seen or `trial_budget`
/// trials have run; the stopping point is a pure function of the records, so
/// worker counts cannot shift it.
pub fn conditional_unidentified_stats(
    cfg: &ExperimentConfig,
    k_values: &[usize],
    failure_target: usize,
    trial_budget: usize,
    workers: usize,
) -> Result<Vec<ConditionalStat>, HarnessError> {
    let mut out = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let mut k_cfg = cfg.clone();
        k_cfg.sparsity = k;
        k_cfg.iota_max = 0;
        k_cfg.trials = trial_budget.max(1);
        k_cfg.validate()?;
        let fixed = build_fixed(&k_cfg)?;

        let mut ratios: Vec<f64> = Vec::new();
        let mut trials_run = 0usize;
        while trials_run < trial_budget && ratios.len() < failure_target {
            let hi = (trials_run + STATS_BATCH).min(trial_budget);
            let records = run_trial_range(&k_cfg, fixed.as_ref(), trials_run..hi, workers)?;
            trials_run = hi;
            ratios.extend(
                records
                    .iter()
                    .filter(|r| !r.is_success())
                    .map(|r| r.unidentified_at_first_stall as f64 / k as f64),
            );
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
        let failures = ratios.len();
        let (mean, median, p90) = if failures == 0 {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = ratios.iter().sum::<f64>() / failures as f64;
            let median = if failures % 2 == 1 {
                ratios[failures / 2]
            } else {
                (ratios[failures / 2 - 1] + ratios[failures / 2]) / 2.0
            };
            // nearest-rank percentile
            let idx = ((failures as f64 * 0.9).ceil() as usize).clamp(1, failures) - 1;
            (mean, median, ratios[idx])
        };
        out.push(ConditionalStat {
            sparsity: k,
            trials_run,
            failures,
            mean_ratio: mean,
            median_ratio: median,
            p90_ratio: p90,
            insufficient: failures < failure_target,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// CSV formats
// ---------------------------------------------------------------------------

fn manifest_line(manifest_ref: &str) -> String {
    format!("# manifest: {manifest_ref}\n")
}

/// Trials file: one record per row. Wall time is deliberately omitted so the
/// bytes are reproducible.
pub fn trials_csv(records: &[TrialRecord], manifest_ref: &str) -> String {
    let mut out = manifest_line(manifest_ref);
    out.push_str("trial,outcome,samples_used,unidentified_at_first_stall,false_verification\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial_index,
            r.outcome.as_str(),
            r.samples_used,
            r.unidentified_at_first_stall,
            u8::from(r.false_verification)
        ));
    }
    out
}

pub fn curve_csv(curve: &FailureCurve, manifest_ref: &str) -> String {
    let mut out = manifest_line(manifest_ref);
    out.push_str("L,failures,trials,p_hat,ci_low,ci_high\n");
    for p in &curve.points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.l, p.failures, p.trials, p.p_hat, p.ci_low, p.ci_high
        ));
    }
    out
}

pub fn stats_csv(stats: &[ConditionalStat], manifest_ref: &str) -> String {
    let mut out = manifest_line(manifest_ref);
    out.push_str("K,mean_ratio,median_ratio,p90_ratio,failures\n");
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.sparsity, s.mean_ratio, s.median_ratio, s.p90_ratio, s.failures
        ));
    }
    out
}

/// Reads a curve file back; `#` lines and the header are skipped.
pub fn parse_curve_csv(text: &str) -> Result<FailureCurve, HarnessError> {
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("L,") {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(HarnessError::CsvParse {
                line: lineno,
                msg: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let err = |what: &str| HarnessError::CsvParse {
            line: lineno,
            msg: format!("bad {what} field"),
        };
        points.push(CurvePoint {
            l: fields[0].parse().map_err(|_| err("L"))?,
            failures: fields[1].parse().map_err(|_| err("failures"))?,
            trials: fields[2].parse().map_err(|_| err("trials"))?,
            p_hat: fields[3].parse().map_err(|_| err("p_hat"))?,
            ci_low: fields[4].parse().map_err(|_| err("ci_low"))?,
            ci_high: fields[5].parse().map_err(|_| err("ci_high"))?,
        });
    }
    Ok(FailureCurve { points })
}
