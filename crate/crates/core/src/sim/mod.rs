//! Deterministic simulated device under test.
//!
//! A [`DeviceModel`] is the static description loaded from JSON; a [`Device`]
//! is one running instance with its own clock. Devices are single-threaded
//! and hold no shared state, so separate instances can run on separate
//! threads.

mod curve;
mod device;
mod model;

use thiserror::Error;

pub use curve::PowerCurve;
pub use device::{Device, SimClock, StepReading, DEFAULT_STEP_S};
pub use model::{CheatBehavior, CheatKind, DeviceModel, PowerState, WarmupModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("power state {0} does not exist")]
    UnknownState(u32),
    #[error("no NDR configured for {0}-byte packets")]
    PacketSizeUnknown(u32),
    #[error("offered load {offered} Gbps exceeds line rate {line_rate} Gbps")]
    OfferedExceedsLineRate { offered: f64, line_rate: f64 },
    #[error("duration must be positive, got {0} s")]
    NonPositiveDuration(f64),
    #[error("simulation step must be positive, got {0} s")]
    InvalidStep(f64),
    #[error("{path}:{line}:{column}: invalid device model: {message}")]
    InvalidModel { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
