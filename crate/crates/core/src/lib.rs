//! Recovery of sparse real signals from sparse binary measurements by
//! verification decoding, with an incremental direct-sampling fallback.
//!
//! A length-N signal with K nonzeros is observed through an M x N binary
//! matrix, viewed as a bipartite graph between signal entries (variables)
//! and measurements (checks). The [`decoder`] pins variable values from
//! zero measurements, degree-one checks and equal-measurement check pairs,
//! peeling verified values out of the residual until it either finishes or
//! stalls. When it stalls, the [`incremental`] decoder buys progress by
//! sampling the signal directly at chosen unidentified locations, one value
//! per stall.
//!
//! The [`oracle`] module provides brute-force minimum-weight recovery on
//! tiny instances, used as ground truth for the decoder, and the
//! [`harness`] runs the reproducible Monte Carlo experiments behind
//! failure-probability curves and their decay fits.

pub mod decoder;
pub mod graph;
pub mod harness;
pub mod incremental;
pub mod oracle;
pub mod seed;
pub mod signal;
pub mod stats;

pub use decoder::{DecodeOutcome, DecodeReport, DecoderState};
pub use graph::MeasurementGraph;
pub use harness::{ExperimentConfig, FailureCurve, MatrixMode, TrialRecord};
pub use incremental::{
    run_incremental, run_incremental_with_state, IncrementalConfig, IncrementalOutcome,
    IncrementalReport, SampleOracle, TriggerPolicy,
};
pub use oracle::{enumerate_coset_leaders, recovery_guarantee_holds, spark};
pub use signal::{generate_gaussian_sparse, measure, MeasurementVector, SparseSignal};
pub use stats::{fit_decay, wilson95, DecayFit};
