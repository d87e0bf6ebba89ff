//! Verification decoding with fixed measurements.
//!
//! Three rules pin variable values from the residual measurements:
//!
//! 1. a (near-)zero measurement verifies all of its unidentified neighbors
//!    as zero;
//! 2. a check with exactly one unidentified neighbor verifies that neighbor
//!    to its residual value;
//! 3. two checks with equal nonzero residuals that share exactly one
//!    unidentified variable verify that variable to the common value and
//!    everything else they touch to zero.
//!
//! One iteration collects verifications from all three rules against the
//! iteration-start residual, then peels once: verified values are subtracted
//! from their checks and the edges are logically removed. The loop repeats
//! until every variable is identified or an iteration verifies nothing.
//!
//! Measurements are real-valued, so equality and zeroness are tested with
//! absolute tolerances; defaults are far above accumulated rounding and far
//! below generic value gaps for unit-scale signals.

use thiserror::Error;

use crate::graph::MeasurementGraph;
use crate::signal::{MeasurementVector, SparseSignal};

pub const DEFAULT_EPS_ZERO: f64 = 1e-9;
pub const DEFAULT_EPS_EQ: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tolerances must be nonnegative")]
    InvalidTolerance,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("decoder state is partial: {0} variables unidentified")]
    PartialState(usize),
}

/// Which rule produced a verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyRule {
    Zero,
    DegreeOne,
    EqualPair,
    Sample,
}

impl VerifyRule {
    pub fn as_str(self) -> &'static str {
        match self {
            VerifyRule::Zero => "zero",
            VerifyRule::DegreeOne => "degree_one",
            VerifyRule::EqualPair => "equal_pair",
            VerifyRule::Sample => "sample",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyEvent {
    pub iteration: usize,
    pub rule: VerifyRule,
    pub variable: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Every variable identified and all residuals cleared.
    Success,
    /// An iteration verified nothing (or completion left residual energy
    /// behind, which indicates a false verification).
    Stalled,
    MaxIterations,
}

impl DecodeOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeOutcome::Success => "success",
            DecodeOutcome::Stalled => "stalled",
            DecodeOutcome::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub outcome: DecodeOutcome,
    pub iterations_used: usize,
    pub unidentified_count: usize,
    pub residual_max_abs: f64,
    pub per_iteration_verified: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarStatus {
    Free,
    /// Verified this round, not yet peeled. Still counts as unidentified.
    Pending,
    Identified,
}

/// Mutable decoding state over one immutable graph.
#[derive(Debug, Clone)]
pub struct DecoderState<'g> {
    graph: &'g MeasurementGraph,
    residual: Vec<f64>,
    residual_degree: Vec<u32>,
    status: Vec<VarStatus>,
    value: Vec<f64>,
    identified_count: usize,
    pending: Vec<u32>,
    iteration: usize,
    eps_zero: f64,
    eps_eq: f64,
    conflicts: usize,
    record_events: bool,
    events: Vec<VerifyEvent>,
}

impl<'g> DecoderState<'g> {
    pub fn init(
        graph: &'g MeasurementGraph,
        s: &MeasurementVector,
        eps_zero: f64,
        eps_eq: f64,
    ) -> Result<Self, DecodeError> {
        if s.len() != graph.n_checks() {
            return Err(DecodeError::DimensionMismatch(format!(
                "{} measurements vs {} checks",
                s.len(),
                graph.n_checks()
            )));
        }
        if eps_zero < 0.0 || eps_eq < 0.0 {
            return Err(DecodeError::InvalidTolerance);
        }
        let residual_degree = (0..graph.n_checks())
            .map(|m| graph.vars_of(m).len() as u32)
            .collect();
        Ok(DecoderState {
            graph,
            residual: s.as_slice().to_vec(),
            residual_degree,
            status: vec![VarStatus::Free; graph.n_vars()],
            value: vec![0.0; graph.n_vars()],
            identified_count: 0,
            pending: Vec::new(),
            iteration: 0,
            eps_zero,
            eps_eq,
            conflicts: 0,
            record_events: false,
            events: Vec::new(),
        })
    }

    /// Turns on the per-verification event log (off by default; Monte Carlo
    /// runs do not want the allocation).
    pub fn record_events(&mut self, on: bool) {
        self.record_events = on;
    }

    pub fn graph(&self) -> &MeasurementGraph {
        self.graph
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn eps_zero(&self) -> f64 {
        self.eps_zero
    }

    pub fn eps_eq(&self) -> f64 {
        self.eps_eq
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn residual_degrees(&self) -> &[u32] {
        &self.residual_degree
    }

    pub fn residual_max_abs(&self) -> f64 {
        self.residual.iter().fold(0.0, |a, &r| a.max(r.abs()))
    }

    /// Count of variables not yet peeled into the identified set.
    pub fn unidentified_count(&self) -> usize {
        self.graph.n_vars() - self.identified_count
    }

    pub fn identified_count(&self) -> usize {
        self.identified_count
    }

    pub fn is_identified(&self, n: usize) -> bool {
        self.status[n] == VarStatus::Identified
    }

    pub fn identified_value(&self, n: usize) -> Option<f64> {
        (self.status[n] == VarStatus::Identified).then(|| self.value[n])
    }

    /// Unidentified variables, ascending. Pending verifications still count
    /// as unidentified until peeled.
    pub fn unidentified_vars(&self) -> Vec<usize> {
        (0..self.graph.n_vars())
            .filter(|&n| self.status[n] != VarStatus::Identified)
            .collect()
    }

    /// Verifications collected by rules since the last peel.
    pub fn pending_verifications(&self) -> Vec<(usize, f64)> {
        self.pending
            .iter()
            .map(|&n| (n as usize, self.value[n as usize]))
            .collect()
    }

    /// Verifications that disagreed with an earlier one by more than the
    /// equality tolerance. Nonzero means a false verification happened.
    pub fn conflict_count(&self) -> usize {
        self.conflicts
    }

    pub fn events(&self) -> &[VerifyEvent] {
        &self.events
    }

    /// Event log as CSV with header `iteration,rule,variable,value`.
    pub fn events_to_csv(&self) -> String {
        let mut out = String::from("iteration,rule,variable,value\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.iteration,
                e.rule.as_str(),
                e.variable,
                e.value
            ));
        }
        out
    }

    fn propose(&mut self, n: usize, v: f64, rule: VerifyRule) -> bool {
        match self.status[n] {
            VarStatus::Free => {
                self.status[n] = VarStatus::Pending;
                self.value[n] = v;
                self.pending.push(n as u32);
                if self.record_events {
                    self.events.push(VerifyEvent {
                        iteration: self.iteration + 1,
                        rule,
                        variable: n,
                        value: v,
                    });
                }
                true
            }
            VarStatus::Pending | VarStatus::Identified => {
                if (self.value[n] - v).abs() > self.eps_eq {
                    self.conflicts += 1;
                }
                false
            }
        }
    }

    /// Rule 1: every check whose residual is (near) zero but still has
    /// unidentified neighbors verifies all of them as zero. Returns the
    /// number of newly verified variables; peeling is separate.
    pub fn apply_zero_rule(&mut self) -> usize {
        let mut newly = 0;
        for m in 0..self.graph.n_checks() {
            if self.residual_degree[m] >= 1 && self.residual[m].abs() <= self.eps_zero {
                for &n in self.graph.vars_of(m) {
                    if self.status[n as usize] != VarStatus::Identified
                        && self.propose(n as usize, 0.0, VerifyRule::Zero)
                    {
                        newly += 1;
                    }
                }
            }
        }
        newly
    }

    /// Rule 2: a check with exactly one unidentified neighbor verifies that
    /// neighbor to the check's residual value.
    pub fn apply_degree_one_rule(&mut self) -> usize {
        let mut newly = 0;
        for m in 0..self.graph.n_checks() {
            if self.residual_degree[m] == 1 {
                let n = self
                    .graph
                    .vars_of(m)
                    .iter()
                    .find(|&&n| self.status[n as usize] != VarStatus::Identified)
                    .copied();
                if let Some(n) = n {
                    if self.propose(n as usize, self.residual[m], VerifyRule::DegreeOne) {
                        newly += 1;
                    }
                }
            }
        }
        newly
    }

    /// Shared unidentified variables of two checks, capped at 2 since only
    /// "exactly one" matters.
    fn shared_unidentified(&self, m1: usize, m2: usize) -> usize {
        let (a, b) = (self.graph.vars_of(m1), self.graph.vars_of(m2));
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            if a[i] == b[j] {
                if self.status[a[i] as usize] != VarStatus::Identified {
                    count += 1;
                    if count == 2 {
                        return count;
                    }
                }
                i += 1;
                j += 1;
            } else if a[i] < b[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        count
    }

    /// Rule 3: for an unidentified variable whose two checks carry equal
    /// nonzero residuals and overlap in no other unidentified variable, the
    /// variable takes the common value and every other unidentified neighbor
    /// of either check is verified as zero.
    pub fn apply_equal_pair_rule(&mut self) -> usize {
        let mut newly = 0;
        for n in 0..self.graph.n_vars() {
            if self.status[n] == VarStatus::Identified {
                continue;
            }
            let ms = self.graph.checks_of(n);
            'pairs: for i in 0..ms.len() {
                for j in i + 1..ms.len() {
                    let (m1, m2) = (ms[i] as usize, ms[j] as usize);
                    let (r1, r2) = (self.residual[m1], self.residual[m2]);
                    if (r1 - r2).abs() > self.eps_eq {
                        continue;
                    }
                    let v = if r1.abs() > self.eps_zero {
                        r1
                    } else if r2.abs() > self.eps_zero {
                        r2
                    } else {
                        continue;
                    };
                    if self.shared_unidentified(m1, m2) != 1 {
                        continue;
                    }
                    if self.propose(n, v, VerifyRule::EqualPair) {
                        newly += 1;
                    }
                    for m in [m1, m2] {
                        for &other in self.graph.vars_of(m) {
                            let other = other as usize;
                            if other != n
                                && self.status[other] != VarStatus::Identified
                                && self.propose(other, 0.0, VerifyRule::EqualPair)
                            {
                                newly += 1;
                            }
                        }
                    }
                    break 'pairs;
                }
            }
        }
        newly
    }

    /// Verifies one variable from outside the rules (a direct sample).
    pub fn inject_verified(&mut self, n: usize, v: f64) -> bool {
        self.propose(n, v, VerifyRule::Sample)
    }

    /// Commits all pending verifications: marks them identified, subtracts
    /// nonzero values from their checks and removes the edges. Errors only
    /// if a residual degree would go negative, which indicates corruption.
    pub fn peel_pending(&mut self) -> Result<usize, DecodeError> {
        let peeled = self.pending.len();
        for idx in 0..self.pending.len() {
            let n = self.pending[idx] as usize;
            debug_assert_eq!(self.status[n], VarStatus::Pending);
            self.status[n] = VarStatus::Identified;
            self.identified_count += 1;
            let v = self.value[n];
            for &m in self.graph.checks_of(n) {
                let m = m as usize;
                if self.residual_degree[m] == 0 {
                    return Err(DecodeError::InternalInconsistency(format!(
                        "residual degree of check {m} would go negative"
                    )));
                }
                self.residual_degree[m] -= 1;
                if v != 0.0 {
                    self.residual[m] -= v;
                }
            }
        }
        self.pending.clear();
        Ok(peeled)
    }

    /// One full iteration: the three rules against the iteration-start
    /// residual, then a single peel. Returns how many variables it verified.
    pub fn run_iteration(&mut self) -> usize {
        self.apply_zero_rule();
        self.apply_degree_one_rule();
        self.apply_equal_pair_rule();
        let verified = self
            .peel_pending()
            .expect("peel failed on rule-collected verifications");
        self.iteration += 1;
        verified
    }

    fn report(&self, outcome: DecodeOutcome, per_iteration_verified: Vec<usize>) -> DecodeReport {
        DecodeReport {
            outcome,
            iterations_used: self.iteration,
            unidentified_count: self.unidentified_count(),
            residual_max_abs: self.residual_max_abs(),
            per_iteration_verified,
        }
    }

    /// Iterates until every variable is identified, an iteration verifies
    /// nothing, or `max_iterations` is reached.
    pub fn run_to_convergence(&mut self, max_iterations: usize) -> DecodeReport {
        let mut per_iter = Vec::new();
        loop {
            let verified = self.run_iteration();
            per_iter.push(verified);
            if self.unidentified_count() == 0 {
                let outcome = if self.residual_max_abs() <= self.eps_zero {
                    DecodeOutcome::Success
                } else {
                    DecodeOutcome::Stalled
                };
                return self.report(outcome, per_iter);
            }
            if verified == 0 {
                return self.report(DecodeOutcome::Stalled, per_iter);
            }
            if self.iteration >= max_iterations {
                return self.report(DecodeOutcome::MaxIterations, per_iter);
            }
        }
    }

    /// The recovered signal; requires every variable identified.
    pub fn extract_signal(&self) -> Result<SparseSignal, DecodeError> {
        if self.unidentified_count() > 0 {
            return Err(DecodeError::PartialState(self.unidentified_count()));
        }
        let pairs: Vec<(usize, f64)> = (0..self.graph.n_vars())
            .filter(|&n| self.value[n] != 0.0)
            .map(|n| (n, self.value[n]))
            .collect();
        SparseSignal::from_pairs(self.graph.n_vars(), &pairs)
            .map_err(|e| DecodeError::InternalInconsistency(e.to_string()))
    }

    pub(crate) fn snapshot_report(
        &self,
        outcome: DecodeOutcome,
        per_iter: &[usize],
    ) -> DecodeReport {
        self.report(outcome, per_iter.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MeasurementGraph;
    use crate::signal::measure;

    fn six_cycle() -> MeasurementGraph {
        MeasurementGraph::from_var_lists(3, 3, &[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap()
    }

    fn init<'g>(g: &'g MeasurementGraph, s: &[f64]) -> DecoderState<'g> {
        DecoderState::init(
            g,
            &MeasurementVector::new(s.to_vec()),
            DEFAULT_EPS_ZERO,
            DEFAULT_EPS_EQ,
        )
        .unwrap()
    }

    #[test]
    fn init_state() {
        let g = six_cycle();
        let st = init(&g, &[-0.5, 1.5, -2.0]);
        assert_eq!(st.residual_degrees(), &[2, 2, 2]);
        assert_eq!(st.unidentified_count(), 3);
        assert_eq!(st.iteration(), 0);

        let bad = DecoderState::init(
            &g,
            &MeasurementVector::new(vec![0.0; 2]),
            DEFAULT_EPS_ZERO,
            DEFAULT_EPS_EQ,
        );
        assert!(matches!(bad, Err(DecodeError::DimensionMismatch(_))));

        let zero = DecoderState::init(
            &g,
            &MeasurementVector::new(vec![0.0; 3]),
            DEFAULT_EPS_ZERO,
            DEFAULT_EPS_EQ,
        );
        assert!(zero.is_ok());
    }

    // e = (1.5, 0, 0) against the 6-cycle: s = (1.5, 1.5, 0).
    #[test]
    fn zero_rule_hand_trace() {
        let g = six_cycle();
        let mut st = init(&g, &[1.5, 1.5, 0.0]);
        assert_eq!(st.apply_zero_rule(), 2); // v1, v2 via c2
        let mut pend = st.pending_verifications();
        pend.sort_by_key(|&(n, _)| n);
        assert_eq!(pend, vec![(1, 0.0), (2, 0.0)]);

        let mut none = init(&g, &[1.0, 2.0, 3.0]);
        assert_eq!(none.apply_zero_rule(), 0);

        // all-zero measurements verify every connected variable
        let mut all = init(&g, &[0.0, 0.0, 0.0]);
        assert_eq!(all.apply_zero_rule(), 3);
    }

    #[test]
    fn degree_one_rule_after_peel() {
        let g = six_cycle();
        let mut st = init(&g, &[1.5, 1.5, 0.0]);
        st.apply_zero_rule();
        st.peel_pending().unwrap();
        assert_eq!(st.residual_degrees(), &[1, 1, 0]);
        assert_eq!(st.apply_degree_one_rule(), 1);
        assert_eq!(st.pending_verifications(), vec![(0, 1.5)]);
        st.peel_pending().unwrap();
        assert!(st.residual_max_abs() <= 1e-12);
        assert_eq!(st.residual_degrees(), &[0, 0, 0]);
    }

    #[test]
    fn degree_one_rule_no_candidates() {
        let g = six_cycle();
        let mut st = init(&g, &[1.0, 2.0, 3.0]);
        assert_eq!(st.apply_degree_one_rule(), 0);
    }

    #[test]
    fn two_degree_one_checks_same_variable() {
        // one variable attached to two checks, both measuring it directly
        let g = MeasurementGraph::from_var_lists(1, 2, &[vec![0, 1]]).unwrap();
        let mut st = init(&g, &[2.5, 2.5]);
        assert_eq!(st.apply_degree_one_rule(), 1);
        assert_eq!(st.conflict_count(), 0);
        st.peel_pending().unwrap();
        assert_eq!(st.residual_degrees(), &[0, 0]);
        assert!(st.residual_max_abs() <= 1e-12);
        assert_eq!(st.unidentified_count(), 0);
    }

    #[test]
    fn equal_pair_rule_instance() {
        // m0: {v1, v2}, m1: {v1, v4}; residuals both 1.7; v0, v3 isolated
        let g =
            MeasurementGraph::from_var_lists(5, 2, &[vec![], vec![0, 1], vec![0], vec![], vec![1]])
                .unwrap();
        let mut st = init(&g, &[1.7, 1.7]);
        assert_eq!(st.apply_equal_pair_rule(), 3);
        let mut pend = st.pending_verifications();
        pend.sort_by_key(|&(n, _)| n);
        assert_eq!(pend, vec![(1, 1.7), (2, 0.0), (4, 0.0)]);
    }

    #[test]
    fn equal_pair_rule_tolerance_and_zero_gates() {
        let g =
            MeasurementGraph::from_var_lists(5, 2, &[vec![], vec![0, 1], vec![0], vec![], vec![1]])
                .unwrap();
        // unequal beyond eps_eq
        let mut st = init(&g, &[1.7, 1.7 + 1e-3]);
        assert_eq!(st.apply_equal_pair_rule(), 0);
        // both residuals zero: the zero rule's job, not this one's
        let mut st = init(&g, &[0.0, 0.0]);
        assert_eq!(st.apply_equal_pair_rule(), 0);
    }

    #[test]
    fn full_decode_success() {
        let g = six_cycle();
        let e = SparseSignal::from_pairs(3, &[(0, 1.5)]).unwrap();
        let s = measure(&g, &e).unwrap();
        let mut st = DecoderState::init(&g, &s, DEFAULT_EPS_ZERO, DEFAULT_EPS_EQ).unwrap();
        let report = st.run_to_convergence(10);
        assert_eq!(report.outcome, DecodeOutcome::Success);
        assert!(report.iterations_used <= 2);
        assert_eq!(report.unidentified_count, 0);
        assert!(report.residual_max_abs <= DEFAULT_EPS_ZERO);
        let recovered = st.extract_signal().unwrap();
        assert!(recovered.max_abs_diff(&e) <= 1e-12);
    }

    #[test]
    fn generic_dense_signal_stalls() {
        let g = six_cycle();
        let e = SparseSignal::from_pairs(3, &[(0, 0.7), (1, -1.3), (2, 2.9)]).unwrap();
        let s = measure(&g, &e).unwrap();
        let mut st = DecoderState::init(&g, &s, DEFAULT_EPS_ZERO, DEFAULT_EPS_EQ).unwrap();
        let report = st.run_to_convergence(10);
        assert_eq!(report.outcome, DecodeOutcome::Stalled);
        assert_eq!(report.unidentified_count, 3);
        assert!(matches!(
            st.extract_signal(),
            Err(DecodeError::PartialState(3))
        ));
    }

    #[test]
    fn zero_signal_immediate_success() {
        let g = six_cycle();
        let mut st = init(&g, &[0.0, 0.0, 0.0]);
        let report = st.run_to_convergence(10);
        assert_eq!(report.outcome, DecodeOutcome::Success);
        assert_eq!(report.iterations_used, 1);
        assert_eq!(st.extract_signal().unwrap().sparsity(), 0);
    }

    #[test]
    fn peel_empty_is_noop() {
        let g = six_cycle();
        let mut st = init(&g, &[1.0, 2.0, 3.0]);
        assert_eq!(st.peel_pending().unwrap(), 0);
        assert_eq!(st.residual(), &[1.0, 2.0, 3.0]);
        assert_eq!(st.residual_degrees(), &[2, 2, 2]);
    }

    #[test]
    fn event_log_csv() {
        let g = six_cycle();
        let e = SparseSignal::from_pairs(3, &[(0, 1.5)]).unwrap();
        let s = measure(&g, &e).unwrap();
        let mut st = DecoderState::init(&g, &s, DEFAULT_EPS_ZERO, DEFAULT_EPS_EQ).unwrap();
        st.record_events(true);
        st.run_to_convergence(10);
        let csv = st.events_to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("iteration,rule,variable,value"));
        assert_eq!(st.events().len(), 3);
        assert!(csv.contains("1,zero,1,0"));
        assert!(csv.contains("equal_pair,0,1.5"));
    }

    #[test]
    fn report_invariant_success_means_clean() {
        // complete identification with a wrong value must not be Success
        let g = MeasurementGraph::from_var_lists(1, 1, &[vec![0]]).unwrap();
        let mut st = init(&g, &[4.0]);
        st.inject_verified(0, 1.0);
        st.peel_pending().unwrap();
        let report = st.run_to_convergence(3);
        assert_eq!(report.unidentified_count, 0);
        assert_eq!(report.outcome, DecodeOutcome::Stalled);
    }
}
