//! Verification decoding with incremental direct sampling.
//!
//! When the rule-based decoder stops making progress, much of the signal is
//! usually already identified. Instead of adding new combined measurements,
//! the decoder asks for the value of one unidentified variable directly:
//! pick a check of minimum residual degree, pick one of its unidentified
//! neighbors at random, sample it, peel, and resume the rules. Each sample
//! strictly shrinks the unidentified set, so with enough budget the decoder
//! always finishes.

use rand::Rng;
use thiserror::Error;

use crate::decoder::{DecodeError, DecodeOutcome, DecodeReport, DecoderState};
use crate::graph::MeasurementGraph;
use crate::signal::{MeasurementVector, SparseSignal};

#[derive(Debug, Error)]
pub enum IncrementalError {
    #[error("nothing to sample: every variable is identified")]
    NothingToSample,
    #[error("sample unavailable for variable {0}")]
    SampleUnavailable(usize),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// When to spend a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerPolicy {
    /// Sample only when an iteration verified nothing. Never wastes a
    /// sample while the rules still make progress.
    OnStall,
    /// Sample on every iteration once the iteration counter exceeds the
    /// threshold, whether or not the rules are progressing.
    IterationThreshold(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IncrementalConfig {
    pub trigger: TriggerPolicy,
    /// Maximum number of direct samples.
    pub iota_max: usize,
    pub max_iterations: usize,
    pub eps_zero: f64,
    pub eps_eq: f64,
}

impl IncrementalConfig {
    /// Defaults for a length-`n` signal: sample on stall, unbounded budget
    /// (a sample per variable always suffices), iteration cap `n`.
    pub fn for_signal_len(n: usize) -> Self {
        IncrementalConfig {
            trigger: TriggerPolicy::OnStall,
            iota_max: n,
            max_iterations: n,
            eps_zero: crate::decoder::DEFAULT_EPS_ZERO,
            eps_eq: crate::decoder::DEFAULT_EPS_EQ,
        }
    }

    pub fn with_budget(mut self, iota_max: usize) -> Self {
        self.iota_max = iota_max;
        self
    }

    pub fn with_trigger(mut self, trigger: TriggerPolicy) -> Self {
        self.trigger = trigger;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }
}

/// Answers direct-sampling requests with the true signal value at a
/// location. Must be consistent: the same variable always yields the same
/// value. Every call costs one unit of the sample budget.
pub trait SampleOracle {
    fn sample(&self, var: usize) -> Option<f64>;
}

impl SampleOracle for SparseSignal {
    fn sample(&self, var: usize) -> Option<f64> {
        (var < self.length()).then(|| self.value_at(var))
    }
}

impl<F: Fn(usize) -> Option<f64>> SampleOracle for F {
    fn sample(&self, var: usize) -> Option<f64> {
        self(var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncrementalOutcome {
    Success,
    /// Stalled with the sample budget spent.
    Exhausted,
    MaxIterations,
}

impl IncrementalOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            IncrementalOutcome::Success => "success",
            IncrementalOutcome::Exhausted => "exhausted",
            IncrementalOutcome::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncrementalReport {
    pub outcome: IncrementalOutcome,
    /// Direct samples spent (the L of a failure curve).
    pub samples_used: usize,
    pub iterations_used: usize,
    /// Unidentified count at the first iteration that verified nothing;
    /// zero if the rules never stalled.
    pub unidentified_at_first_stall: usize,
    /// What the rule-only decoder did before any sampling.
    pub base_report: DecodeReport,
}

impl IncrementalReport {
    /// One CSV row: `outcome,L,k,unidentified_at_first_stall`.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.outcome.as_str(),
            self.samples_used,
            self.iterations_used,
            self.unidentified_at_first_stall
        )
    }
}

/// Picks the variable to sample next: an unidentified neighbor (uniform) of
/// a minimum-residual-degree check (ties uniform). Unidentified variables
/// with no unresolved check, which only exist when the graph has isolated
/// variables, are drawn uniformly instead.
pub fn select_sample_location<R: Rng + ?Sized>(
    st: &DecoderState<'_>,
    rng: &mut R,
) -> Result<usize, IncrementalError> {
    if st.unidentified_count() == 0 {
        return Err(IncrementalError::NothingToSample);
    }
    let degrees = st.residual_degrees();
    let mut min_degree = u32::MAX;
    for &d in degrees {
        if d >= 1 && d < min_degree {
            min_degree = d;
        }
    }
    if min_degree == u32::MAX {
        let vars = st.unidentified_vars();
        return Ok(vars[rng.random_range(0..vars.len())]);
    }
    let candidates: Vec<usize> = (0..degrees.len())
        .filter(|&m| degrees[m] == min_degree)
        .collect();
    let m = candidates[rng.random_range(0..candidates.len())];
    let neighbors: Vec<usize> = st
        .graph()
        .vars_of(m)
        .iter()
        .map(|&n| n as usize)
        .filter(|&n| !st.is_identified(n))
        .collect();
    debug_assert_eq!(neighbors.len(), min_degree as usize);
    Ok(neighbors[rng.random_range(0..neighbors.len())])
}

/// Runs verification decoding, spending direct samples per the trigger
/// policy, and returns the report together with the final decoder state.
pub fn run_incremental_with_state<'g, O, R>(
    g: &'g MeasurementGraph,
    s: &MeasurementVector,
    oracle: &O,
    cfg: &IncrementalConfig,
    rng: &mut R,
) -> Result<(IncrementalReport, DecoderState<'g>), IncrementalError>
where
    O: SampleOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut st = DecoderState::init(g, s, cfg.eps_zero, cfg.eps_eq)?;
    run_incremental_on_state(&mut st, oracle, cfg, rng).map(|report| (report, st))
}

/// As [`run_incremental_with_state`] but without access to the final state.
pub fn run_incremental<O, R>(
    g: &MeasurementGraph,
    s: &MeasurementVector,
    oracle: &O,
    cfg: &IncrementalConfig,
    rng: &mut R,
) -> Result<IncrementalReport, IncrementalError>
where
    O: SampleOracle + ?Sized,
    R: Rng + ?Sized,
{
    run_incremental_with_state(g, s, oracle, cfg, rng).map(|(report, _)| report)
}

/// Runs the incremental loop on an already-initialized state, which lets
/// callers flip on event recording first. The state must be fresh.
pub fn run_incremental_on_state<O, R>(
    st: &mut DecoderState<'_>,
    oracle: &O,
    cfg: &IncrementalConfig,
    rng: &mut R,
) -> Result<IncrementalReport, IncrementalError>
where
    O: SampleOracle + ?Sized,
    R: Rng + ?Sized,
{
    // Under an iteration threshold, sampling can start while the rules are
    // still progressing, so the rule-only baseline has to be computed on its
    // own run. Under on-stall the main loop's prefix is that baseline.
    let mut base_report = match cfg.trigger {
        TriggerPolicy::OnStall => None,
        TriggerPolicy::IterationThreshold(_) => {
            let mut clone = st.clone();
            Some(clone.run_to_convergence(cfg.max_iterations))
        }
    };

    let mut samples_used = 0usize;
    let mut first_stall: Option<usize> = None;
    let mut per_iter: Vec<usize> = Vec::new();

    let outcome = loop {
        let verified = st.run_iteration();
        per_iter.push(verified);

        if st.unidentified_count() == 0 {
            if base_report.is_none() {
                base_report = Some(st.snapshot_report(DecodeOutcome::Success, &per_iter));
            }
            break IncrementalOutcome::Success;
        }

        let stalled = verified == 0;
        if stalled && first_stall.is_none() {
            first_stall = Some(st.unidentified_count());
            if base_report.is_none() {
                base_report = Some(st.snapshot_report(DecodeOutcome::Stalled, &per_iter));
            }
        }

        let triggered = match cfg.trigger {
            TriggerPolicy::OnStall => stalled,
            TriggerPolicy::IterationThreshold(kappa0) => st.iteration() > kappa0,
        };
        if triggered {
            if samples_used < cfg.iota_max {
                let n = select_sample_location(st, rng)?;
                let v = oracle
                    .sample(n)
                    .ok_or(IncrementalError::SampleUnavailable(n))?;
                let fresh = st.inject_verified(n, v);
                debug_assert!(fresh, "sample location {n} was already verified");
                st.peel_pending()?;
                samples_used += 1;
                if st.unidentified_count() == 0 {
                    break IncrementalOutcome::Success;
                }
            } else if stalled {
                break IncrementalOutcome::Exhausted;
            }
        }
        if st.iteration() >= cfg.max_iterations {
            break IncrementalOutcome::MaxIterations;
        }
    };

    let base_report =
        base_report.unwrap_or_else(|| st.snapshot_report(DecodeOutcome::MaxIterations, &per_iter));
    Ok(IncrementalReport {
        outcome,
        samples_used,
        iterations_used: st.iteration(),
        unidentified_at_first_stall: first_stall.unwrap_or(0),
        base_report,
    })
}
