use serde::{Deserialize, Serialize};

use super::OrchestratorError;
use crate::metrics::WeightProfile;

/// Bisection settings for the non-drop-rate search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NdrSearchConfig {
    pub packet_size_bytes: u32,
    /// Stop once the bracket is narrower than this fraction of line rate.
    pub resolution: f64,
    /// Fraction of offered traffic a passing trial may lose. Zero is strict non-drop.
    pub loss_tolerance: f64,
    pub trial_duration_s: f64,
}

impl Default for NdrSearchConfig {
    fn default() -> Self {
        Self { packet_size_bytes: 1518, resolution: 0.001, loss_tolerance: 0.0, trial_duration_s: 10.0 }
    }
}

impl NdrSearchConfig {
    pub fn for_packet_size(packet_size_bytes: u32) -> Self {
        Self { packet_size_bytes, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        if !(self.resolution > 0.0 && self.resolution < 1.0) {
            return Err(OrchestratorError::InvalidConfig(format!(
                "ndr_search.resolution = {} must be in (0, 1)",
                self.resolution
            )));
        }
        if !(0.0..1.0).contains(&self.loss_tolerance) {
            return Err(OrchestratorError::InvalidConfig(format!(
                "ndr_search.loss_tolerance = {} must be in [0, 1)",
                self.loss_tolerance
            )));
        }
        positive("ndr_search.trial_duration_s", self.trial_duration_s)
    }
}

/// Warm-up stability check: the device runs at full load and power is read
/// once per `reading_interval_s`; it is stable once the last `window_samples`
/// readings span less than `stability_tol` of their maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WarmupConfig {
    pub window_samples: usize,
    pub stability_tol: f64,
    pub timeout_s: f64,
    pub reading_interval_s: f64,
}

impl Default for WarmupConfig {
    fn default() -> Self {
        Self { window_samples: 30, stability_tol: 0.005, timeout_s: 7200.0, reading_interval_s: 10.0 }
    }
}

impl WarmupConfig {
    pub fn validate(&self) -> Result<(), OrchestratorError> {
        if self.window_samples < 2 {
            return Err(OrchestratorError::InvalidConfig("warmup.window_samples must be at least 2".into()));
        }
        if !(self.stability_tol > 0.0 && self.stability_tol < 1.0) {
            return Err(OrchestratorError::InvalidConfig(format!(
                "warmup.stability_tol = {} must be in (0, 1)",
                self.stability_tol
            )));
        }
        positive("warmup.timeout_s", self.timeout_s)?;
        positive("warmup.reading_interval_s", self.reading_interval_s)
    }
}

/// Return-to-full-capacity probe injected into each non-full phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub enabled: bool,
    /// Length of the full-NDR burst, over which delivery is averaged.
    pub response_window_s: f64,
    /// Allowed shortfall from NDR during the burst.
    pub throughput_tolerance: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { enabled: true, response_window_s: 1.0, throughput_tolerance: 0.01 }
    }
}

impl ProbeConfig {
    pub fn disabled() -> Self {
        Self { enabled: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDurations {
    pub full: f64,
    pub reduced: f64,
    pub idle: f64,
}

impl PhaseDurations {
    pub fn uniform(seconds: f64) -> Self {
        Self { full: seconds, reduced: seconds, idle: seconds }
    }
}

/// Full / reduced / idle variable-load test, always run in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlTestPlan {
    pub weights: WeightProfile,
    pub packet_size_bytes: u32,
    pub phase_duration_s: PhaseDurations,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default = "yes")]
    pub warmup_required: bool,
}

fn yes() -> bool {
    true
}

impl VlTestPlan {
    pub fn new(weights: WeightProfile, packet_size_bytes: u32, phase_seconds: f64) -> Self {
        Self {
            weights,
            packet_size_bytes,
            phase_duration_s: PhaseDurations::uniform(phase_seconds),
            probe: ProbeConfig::default(),
            warmup_required: true,
        }
    }

    pub fn validate(&self) -> Result<(), OrchestratorError> {
        let d = &self.phase_duration_s;
        positive("phase_duration_s.full", d.full)?;
        positive("phase_duration_s.reduced", d.reduced)?;
        positive("phase_duration_s.idle", d.idle)?;
        if self.probe.enabled {
            positive("probe.response_window_s", self.probe.response_window_s)?;
            if !(self.probe.throughput_tolerance > 0.0 && self.probe.throughput_tolerance < 1.0) {
                return Err(OrchestratorError::InvalidConfig(format!(
                    "probe.throughput_tolerance = {} must be in (0, 1)",
                    self.probe.throughput_tolerance
                )));
            }
            if self.probe.response_window_s > d.reduced.min(d.idle) {
                return Err(OrchestratorError::InvalidConfig(
                    "probe.response_window_s must fit inside the reduced and idle phases".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExPhase {
    pub state_id: u32,
    pub phase_duration_s: f64,
    /// Offered load as a fraction of the state's own capacity.
    pub load_fraction_of_state_capacity: f64,
}

/// Extended-idle test: full state then two reduced power states, no idle phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExTestPlan {
    pub weights: WeightProfile,
    pub packet_size_bytes: u32,
    pub state_schedule: Vec<ExPhase>,
}

impl ExTestPlan {
    pub fn validate(&self) -> Result<(), OrchestratorError> {
        if self.state_schedule.len() != 3 {
            return Err(OrchestratorError::InvalidConfig(format!(
                "state_schedule needs exactly three phases, got {}",
                self.state_schedule.len()
            )));
        }
        if self.state_schedule[0].state_id != 0 {
            return Err(OrchestratorError::InvalidConfig("state_schedule[0] must be state 0".into()));
        }
        for (i, p) in self.state_schedule.iter().enumerate() {
            positive(&format!("state_schedule[{i}].phase_duration_s"), p.phase_duration_s)?;
            if !(0.0..=1.0).contains(&p.load_fraction_of_state_capacity) {
                return Err(OrchestratorError::InvalidConfig(format!(
                    "state_schedule[{i}].load_fraction_of_state_capacity must be in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Per-size NDR search and peak energy run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PeakConfig {
    pub ndr_search: NdrSearchConfig,
    pub duration_s: f64,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self { ndr_search: NdrSearchConfig::default(), duration_s: 60.0 }
    }
}

fn positive(field: &str, v: f64) -> Result<(), OrchestratorError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(OrchestratorError::InvalidConfig(format!("{field} must be positive, got {v}")))
    }
}
