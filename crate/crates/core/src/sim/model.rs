use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PowerCurve, SimError};
use crate::metrics::Throughput;

/// An explicitly commanded operating mode with its own capacity and power curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerState {
    pub id: u32,
    /// Fraction of full NDR deliverable in this state.
    pub capacity_fraction: f64,
    /// Power against utilization of this state's own capacity.
    pub curve: PowerCurve,
    #[serde(default)]
    pub enter_latency_s: f64,
    #[serde(default)]
    pub exit_latency_s: f64,
}

/// Cold-start power deficit: `steady * (1 - delta * exp(-t_on / tau_s))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarmupModel {
    pub delta: f64,
    pub tau_s: f64,
}

impl WarmupModel {
    /// Multiplier on steady-state power after `t_on` seconds powered on.
    pub fn factor(&self, t_on: f64) -> f64 {
        1.0 - self.delta * (-t_on.max(0.0) / self.tau_s).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheatKind {
    /// Drops into a lower power state on a fixed timetable, whatever the traffic.
    ScheduledDownshift,
}

/// Adversarial behaviour. Each schedule entry is `(start_s, end_s, target_state_id)`
/// in device time: the device begins a transition to the target at `start_s`
/// and back to state 0 at `end_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheatBehavior {
    pub kind: CheatKind,
    pub schedule: Vec<(f64, f64, u32)>,
}

/// Static description of a simulated device under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDeviceModel")]
pub struct DeviceModel {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub line_rate: Throughput,
    pub ndr_by_packet_size: BTreeMap<u32, Throughput>,
    /// Linear NDR interpolation between configured packet sizes. Off by default.
    #[serde(default)]
    pub ndr_interpolation: bool,
    pub states: Vec<PowerState>,
    #[serde(default)]
    pub warmup: Option<WarmupModel>,
    #[serde(default)]
    pub cheat: Option<CheatBehavior>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawDeviceModel {
    name: String,
    #[serde(default)]
    label: Option<String>,
    line_rate: Throughput,
    ndr_by_packet_size: BTreeMap<u32, Throughput>,
    #[serde(default)]
    ndr_interpolation: bool,
    states: Vec<PowerState>,
    #[serde(default)]
    warmup: Option<WarmupModel>,
    #[serde(default)]
    cheat: Option<CheatBehavior>,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<RawDeviceModel> for DeviceModel {
    type Error = String;

    fn try_from(r: RawDeviceModel) -> Result<Self, Self::Error> {
        let model = DeviceModel {
            name: r.name,
            label: r.label,
            line_rate: r.line_rate,
            ndr_by_packet_size: r.ndr_by_packet_size,
            ndr_interpolation: r.ndr_interpolation,
            states: r.states,
            warmup: r.warmup,
            cheat: r.cheat,
            seed: r.seed,
        };
        let issues = model.validate();
        if issues.is_empty() {
            Ok(model)
        } else {
            Err(issues.join("; "))
        }
    }
}

impl DeviceModel {
    /// Every violated invariant, each prefixed with the offending field.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.name.trim().is_empty() {
            issues.push("name: must not be empty".to_string());
        }
        if self.line_rate.value() <= 0.0 {
            issues.push("line_rate: must be positive".to_string());
        }
        if self.ndr_by_packet_size.is_empty() {
            issues.push("ndr_by_packet_size: needs at least one packet size".to_string());
        }
        for (size, ndr) in &self.ndr_by_packet_size {
            if *size == 0 {
                issues.push("ndr_by_packet_size: packet size must be positive".to_string());
            }
            if ndr.value() <= 0.0 || ndr.value() > self.line_rate.value() {
                issues.push(format!(
                    "ndr_by_packet_size[{size}]: NDR {} must be positive and at most line_rate {}",
                    ndr.value(),
                    self.line_rate.value()
                ));
            }
        }
        if self.states.is_empty() {
            issues.push("states: at least state 0 is required".to_string());
        }
        for (i, s) in self.states.iter().enumerate() {
            if s.id as usize != i {
                issues.push(format!("states[{i}].id: expected {i}, got {} (ids are dense and ordered)", s.id));
            }
            if !(0.0..=1.0).contains(&s.capacity_fraction) {
                issues.push(format!("states[{i}].capacity_fraction: {} is outside [0, 1]", s.capacity_fraction));
            }
            for (field, v) in [("enter_latency_s", s.enter_latency_s), ("exit_latency_s", s.exit_latency_s)] {
                if !(v.is_finite() && v >= 0.0) {
                    issues.push(format!("states[{i}].{field}: must be finite and >= 0, got {v}"));
                }
            }
        }
        if let Some(s0) = self.states.first() {
            if s0.capacity_fraction != 1.0 {
                issues
                    .push(format!("states[0].capacity_fraction: full state must be 1.0, got {}", s0.capacity_fraction));
            }
            if s0.exit_latency_s != 0.0 {
                issues.push("states[0].exit_latency_s: full state must have zero exit latency".to_string());
            }
        }
        for w in self.states.windows(2) {
            if w[1].capacity_fraction >= w[0].capacity_fraction {
                issues.push(format!(
                    "states[{}].capacity_fraction: must be strictly below state {} ({} >= {})",
                    w[1].id, w[0].id, w[1].capacity_fraction, w[0].capacity_fraction
                ));
            }
        }
        if let Some(wm) = &self.warmup {
            if !(0.0..1.0).contains(&wm.delta) {
                issues.push(format!("warmup.delta: {} is outside [0, 1)", wm.delta));
            }
            if !(wm.tau_s.is_finite() && wm.tau_s > 0.0) {
                issues.push(format!("warmup.tau_s: must be positive, got {}", wm.tau_s));
            }
        }
        if let Some(cheat) = &self.cheat {
            let mut prev_end = f64::NEG_INFINITY;
            for (i, &(start, end, target)) in cheat.schedule.iter().enumerate() {
                if !(start.is_finite() && end.is_finite() && start >= 0.0 && start < end) {
                    issues.push(format!("cheat.schedule[{i}]: needs 0 <= start_s < end_s, got ({start}, {end})"));
                }
                if start < prev_end {
                    issues.push(format!("cheat.schedule[{i}]: intervals must be ordered and non-overlapping"));
                }
                if target as usize >= self.states.len() {
                    issues.push(format!("cheat.schedule[{i}]: target state {target} does not exist"));
                }
                prev_end = end;
            }
        }
        issues
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text).map_err(|e| SimError::InvalidModel {
            path: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn state(&self, id: u32) -> Option<&PowerState> {
        self.states.get(id as usize)
    }

    /// NDR at a packet size, interpolating only when the model enables it.
    pub fn ndr(&self, packet_size_bytes: u32) -> Result<Throughput, SimError> {
        if let Some(t) = self.ndr_by_packet_size.get(&packet_size_bytes) {
            return Ok(*t);
        }
        if !self.ndr_interpolation {
            return Err(SimError::PacketSizeUnknown(packet_size_bytes));
        }
        let below = self.ndr_by_packet_size.range(..packet_size_bytes).next_back();
        let above = self.ndr_by_packet_size.range(packet_size_bytes..).next();
        let value = match (below, above) {
            (Some((&s0, t0)), Some((&s1, t1))) => {
                let frac = f64::from(packet_size_bytes - s0) / f64::from(s1 - s0);
                t0.value() + (t1.value() - t0.value()) * frac
            }
            (Some((_, t)), None) | (None, Some((_, t))) => t.value(),
            (None, None) => return Err(SimError::PacketSizeUnknown(packet_size_bytes)),
        };
        Ok(Throughput::gbps(value))
    }
}
