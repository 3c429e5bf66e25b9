//! Energy-efficiency benchmarking for packet network equipment.
//!
//! The crate has four layers:
//!
//! - [`metrics`]: pure metric formulas (ECR, TEEER, ATIS TEER, EER-VL,
//!   EER-EX, allowance budgets, packet-size weighted peak throughput).
//! - [`sim`]: a deterministic, fixed-step simulated device under test with a
//!   piecewise-linear power curve, explicit power states with transition
//!   latencies, warm-up drift and an optional scheduled-downshift cheat.
//! - [`orchestrator`]: the test procedures (NDR search, peak energy run,
//!   variable-load run with return-to-full-capacity probes, extended-idle run,
//!   warm-up precondition) and scenario files.
//! - [`report`]: device reports, comparison tables, JSON and CSV export.
//!
//! The runnable programs under `examples/` walk through each capability; the
//! `greenbench` binary wraps the same calls for scenario files.

mod mean;

pub mod cli;
pub mod fixtures;
pub mod measurement;
pub mod metrics;
pub mod orchestrator;
pub mod report;
pub mod sim;
