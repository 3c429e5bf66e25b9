//! Test procedures driven against a device under test.
//!
//! Each procedure takes exclusive `&mut` access to its [`Device`](crate::sim::Device)
//! for its whole run. The only randomness is probe timing, drawn from an
//! explicit orchestrator seed that the device never sees.

mod config;
mod procedures;
pub mod scenario;

use thiserror::Error;

pub use config::{
    ExPhase, ExTestPlan, NdrSearchConfig, PeakConfig, PhaseDurations, ProbeConfig, VlTestPlan, WarmupConfig,
};
pub use procedures::{
    find_ndr, measure_peak_energy, peak_sample, run_extended_idle_test, run_peak_suite, run_variable_load_test,
    warmup_until_stable, PeakSuiteResult, WarmupReport, PEAK_THROUGHPUT_TOLERANCE, RETURN_TO_FULL_CAPACITY_VIOLATION,
    WARMUP_NOT_MET, WARMUP_SKIPPED_TAG,
};

use crate::measurement::SetError;
use crate::metrics::MetricError;
use crate::sim::SimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrchestratorError {
    #[error(
        "device did not stabilise within the warm-up timeout ({elapsed_s} s elapsed, last relative range {last_range})"
    )]
    WarmupTimeout { elapsed_s: f64, last_range: f64 },
    #[error("device drops traffic at every probed rate for {packet_size_bytes}-byte packets")]
    NoPassingRate { packet_size_bytes: u32 },
    #[error("peak run delivered {delivered} Gbps, below NDR {ndr} Gbps; the NDR is stale")]
    UnexpectedLoss { delivered: f64, ndr: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Set(#[from] SetError),
}
