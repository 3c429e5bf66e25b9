//! Measurement records produced by test procedures and consumed by metrics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, AvgPower, MetricError, MetricResult, PacketSizeWeights, Throughput, WeightProfile};

/// One observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSample")]
pub struct MeasurementSample {
    /// Offered load as a fraction of NDR.
    pub load_fraction: f64,
    pub offered: Throughput,
    pub delivered: Throughput,
    pub power: AvgPower,
    pub duration_s: f64,
    pub packet_size_bytes: u32,
}

#[derive(Deserialize)]
struct RawSample {
    load_fraction: f64,
    offered: Throughput,
    delivered: Throughput,
    power: AvgPower,
    duration_s: f64,
    packet_size_bytes: u32,
}

impl TryFrom<RawSample> for MeasurementSample {
    type Error = SampleError;

    fn try_from(r: RawSample) -> Result<Self, Self::Error> {
        MeasurementSample::new(r.load_fraction, r.offered, r.delivered, r.power, r.duration_s, r.packet_size_bytes)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("delivered {delivered} Gbps exceeds offered {offered} Gbps")]
    DeliveredExceedsOffered { offered: f64, delivered: f64 },
    #[error("load_fraction {0} is outside [0, 1]")]
    LoadFraction(f64),
    #[error("duration_s must be positive, got {0}")]
    Duration(f64),
    #[error("packet_size_bytes must be positive")]
    PacketSize,
}

impl MeasurementSample {
    pub fn new(
        load_fraction: f64,
        offered: Throughput,
        delivered: Throughput,
        power: AvgPower,
        duration_s: f64,
        packet_size_bytes: u32,
    ) -> Result<Self, SampleError> {
        if delivered.value() > offered.value() {
            return Err(SampleError::DeliveredExceedsOffered {
                offered: offered.value(),
                delivered: delivered.value(),
            });
        }
        if !(0.0..=1.0).contains(&load_fraction) {
            return Err(SampleError::LoadFraction(load_fraction));
        }
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(SampleError::Duration(duration_s));
        }
        if packet_size_bytes == 0 {
            return Err(SampleError::PacketSize);
        }
        Ok(Self { load_fraction, offered, delivered, power, duration_s, packet_size_bytes })
    }

    pub fn loss(&self) -> f64 {
        self.offered.value() - self.delivered.value()
    }
}

/// Phase a sample was taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PhaseLabel {
    Full,
    Reduced,
    Idle,
    /// Steady state in an explicit reduced power state.
    State(u32),
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseLabel::Full => f.pad("full"),
            PhaseLabel::Reduced => f.pad("reduced"),
            PhaseLabel::Idle => f.pad("idle"),
            PhaseLabel::State(k) => f.pad(&format!("state-{k}")),
        }
    }
}

impl FromStr for PhaseLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(PhaseLabel::Full),
            "reduced" => Ok(PhaseLabel::Reduced),
            "idle" => Ok(PhaseLabel::Idle),
            _ => s
                .strip_prefix("state-")
                .and_then(|k| k.parse().ok())
                .map(PhaseLabel::State)
                .ok_or_else(|| format!("unknown phase label {s:?}")),
        }
    }
}

impl TryFrom<String> for PhaseLabel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PhaseLabel> for String {
    fn from(p: PhaseLabel) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub phase: PhaseLabel,
    pub sample: MeasurementSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    Peak,
    VariableLoad,
    ExtendedIdle,
}

impl Procedure {
    pub fn as_str(self) -> &'static str {
        match self {
            Procedure::Peak => "peak",
            Procedure::VariableLoad => "variable_load",
            Procedure::ExtendedIdle => "extended_idle",
        }
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Result of one return-to-full-capacity probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub phase: PhaseLabel,
    pub start_s: f64,
    pub window_s: f64,
    pub delivered: Throughput,
    pub required: Throughput,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub device_seed: u64,
    pub orchestrator_seed: u64,
}

/// Samples from one test procedure plus its validity verdict.
///
/// Invalid sets are kept, not discarded: they carry the reason and refuse
/// every metric computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet")]
pub struct MeasurementSet {
    pub device: String,
    pub procedure: Procedure,
    pub ndr: Throughput,
    pub weights: Option<WeightProfile>,
    pub samples: Vec<PhaseSample>,
    pub probes: Vec<ProbeOutcome>,
    pub tags: Vec<String>,
    pub valid: bool,
    pub invalidation_reason: Option<String>,
    pub provenance: Option<Provenance>,
}

#[derive(Deserialize)]
struct RawSet {
    device: String,
    procedure: Procedure,
    ndr: Throughput,
    #[serde(default)]
    weights: Option<WeightProfile>,
    samples: Vec<PhaseSample>,
    #[serde(default)]
    probes: Vec<ProbeOutcome>,
    #[serde(default)]
    tags: Vec<String>,
    valid: bool,
    #[serde(default)]
    invalidation_reason: Option<String>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

impl TryFrom<RawSet> for MeasurementSet {
    type Error = String;

    fn try_from(r: RawSet) -> Result<Self, Self::Error> {
        match (r.valid, &r.invalidation_reason) {
            (true, Some(_)) => return Err("a valid set must not carry an invalidation_reason".into()),
            (false, None) => return Err("an invalid set must carry an invalidation_reason".into()),
            _ => {}
        }
        Ok(MeasurementSet {
            device: r.device,
            procedure: r.procedure,
            ndr: r.ndr,
            weights: r.weights,
            samples: r.samples,
            probes: r.probes,
            tags: r.tags,
            valid: r.valid,
            invalidation_reason: r.invalidation_reason,
            provenance: r.provenance,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("refusing to compute metrics on invalidated test: {0}")]
    Invalidated(String),
    #[error("measurement set has no {0} phase")]
    MissingPhase(PhaseLabel),
    #[error("metric needs weights but none were recorded or supplied")]
    MissingWeights,
    #[error("extended-idle set needs exactly two reduced power-state phases, found {0}")]
    StatePhases(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl MeasurementSet {
    pub fn new(device: impl Into<String>, procedure: Procedure, ndr: Throughput) -> Self {
        Self {
            device: device.into(),
            procedure,
            ndr,
            weights: None,
            samples: Vec::new(),
            probes: Vec::new(),
            tags: Vec::new(),
            valid: true,
            invalidation_reason: None,
            provenance: None,
        }
    }

    pub fn push(&mut self, phase: PhaseLabel, sample: MeasurementSample) {
        self.samples.push(PhaseSample { phase, sample });
    }

    /// Marks the set invalid. The first reason wins.
    pub fn invalidate(&mut self, reason: impl Into<String>) {
        if self.valid {
            self.valid = false;
            self.invalidation_reason = Some(reason.into());
        }
    }

    pub fn ensure_valid(&self) -> Result<(), SetError> {
        if self.valid {
            Ok(())
        } else {
            Err(SetError::Invalidated(self.invalidation_reason.clone().unwrap_or_default()))
        }
    }

    pub fn phase(&self, label: PhaseLabel) -> Option<&MeasurementSample> {
        self.samples.iter().find(|s| s.phase == label).map(|s| &s.sample)
    }

    fn require(&self, label: PhaseLabel) -> Result<&MeasurementSample, SetError> {
        self.phase(label).ok_or(SetError::MissingPhase(label))
    }

    fn weights_or<'a>(&'a self, supplied: Option<&'a WeightProfile>) -> Result<&'a WeightProfile, SetError> {
        supplied.or(self.weights.as_ref()).ok_or(SetError::MissingWeights)
    }

    /// ECR from the first full-load sample: its power over its delivered rate.
    pub fn ecr(&self) -> Result<MetricResult, SetError> {
        self.ensure_valid()?;
        let full = self.require(PhaseLabel::Full)?;
        Ok(metrics::compute_ecr(full.power, full.delivered)?)
    }

    /// Delivered full-load rate per packet size.
    pub fn per_size_ndr(&self) -> BTreeMap<u32, Throughput> {
        self.samples
            .iter()
            .filter(|s| s.phase == PhaseLabel::Full)
            .map(|s| (s.sample.packet_size_bytes, s.sample.delivered))
            .collect()
    }

    pub fn weighted_peak(&self, weights: &PacketSizeWeights) -> Result<MetricResult, SetError> {
        self.ensure_valid()?;
        Ok(metrics::weighted_peak_throughput(&self.per_size_ndr(), weights)?)
    }

    pub fn eer_vl(&self, weights: Option<&WeightProfile>) -> Result<MetricResult, SetError> {
        self.ensure_valid()?;
        let w = self.weights_or(weights)?;
        let full = self.require(PhaseLabel::Full)?;
        let reduced = self.require(PhaseLabel::Reduced)?;
        let idle = self.require(PhaseLabel::Idle)?;
        Ok(metrics::compute_eer_vl(full.delivered, reduced.delivered, full.power, reduced.power, idle.power, w)?)
    }

    /// Logarithmic rating using the idle, reduced and full phases as the
    /// 0 / half / 100% points and NDR as forwarding capacity.
    pub fn teeer(&self, weights: Option<&WeightProfile>) -> Result<MetricResult, SetError> {
        self.ensure_valid()?;
        let w = self.weights_or(weights)?;
        let (idle, half, full) = self.three_points()?;
        Ok(metrics::compute_teeer(idle, half, full, self.ndr, w)?)
    }

    pub fn teer_atis(&self, weights: Option<&WeightProfile>) -> Result<MetricResult, SetError> {
        self.ensure_valid()?;
        let w = self.weights_or(weights)?;
        let (idle, half, full) = self.three_points()?;
        Ok(metrics::compute_teer_atis(idle, half, full, self.ndr, w)?)
    }

    fn three_points(&self) -> Result<(AvgPower, AvgPower, AvgPower), SetError> {
        Ok((
            self.require(PhaseLabel::Idle)?.power,
            self.require(PhaseLabel::Reduced)?.power,
            self.require(PhaseLabel::Full)?.power,
        ))
    }

    pub fn eer_ex(&self, weights: Option<&WeightProfile>) -> Result<MetricResult, SetError> {
        self.ensure_valid()?;
        let w = self.weights_or(weights)?;
        let full = self.require(PhaseLabel::Full)?;
        let states: Vec<&MeasurementSample> =
            self.samples.iter().filter(|s| matches!(s.phase, PhaseLabel::State(_))).map(|s| &s.sample).collect();
        let [r1, r2] = states.as_slice() else {
            return Err(SetError::StatePhases(states.len()));
        };
        Ok(metrics::compute_eer_ex(full.delivered, r1.delivered, r2.delivered, full.power, r1.power, r2.power, w)?)
    }
}
