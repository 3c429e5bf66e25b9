//! Energy-efficiency metric formulas.
//!
//! Every function here is pure: identical inputs give bit-identical outputs,
//! and nothing is cached or shared. Throughput is in Gbps and power in watts
//! throughout.
//!
//! | metric        | formula                                           | units    |
//! |---------------|---------------------------------------------------|----------|
//! | ECR           | `E / T`                                           | W/Gbps   |
//! | TEEER         | `-log10(P / T)`, `P = a*E0 + b*E50 + e*E100`       | -        |
//! | TEER (ATIS)   | `T / P`                                           | Gbps/W   |
//! | EER-VL        | `(a*Tf + b*Tr) / (a*E100 + b*Er + e*Ei)`          | Gbps/W   |
//! | EER-EX        | `(a*Tf + b*Tr1 + e*Tr2) / (a*E100 + b*Er1 + e*Er2)` | Gbps/W |

mod result;
mod units;
mod weights;

use std::collections::BTreeMap;

use thiserror::Error;

pub use result::{MetricKind, MetricResult, RankDirection, Units};
pub use units::{AvgPower, Throughput};
pub use weights::{AllowanceTable, PacketSizeWeights, WeightProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("throughput is zero; the metric is undefined")]
    ZeroThroughput,
    #[error("weighted power {0} W is not positive")]
    NonPositivePower(f64),
    #[error("reduced-load throughput {reduced} Gbps exceeds full-load throughput {full} Gbps")]
    ReducedExceedsFull { reduced: f64, full: f64 },
    #[error("power-state throughputs must not increase with state depth (got {full}, {r1}, {r2} Gbps)")]
    StateOrderViolation { full: f64, r1: f64, r2: f64 },
    #[error("interface class {0:?} has no allowance entry")]
    UnknownInterfaceClass(String),
    #[error("no NDR measured for {0}-byte packets")]
    MissingPacketSize(u32),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("allowance for {class:?} must be positive, got {watts} W")]
    InvalidAllowance { class: String, watts: f64 },
    #[error("{what} must be finite and non-negative, got {value}")]
    InvalidQuantity { what: &'static str, value: f64 },
    #[error("units {units} do not match metric {kind}")]
    UnitsMismatch { kind: MetricKind, units: Units },
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
}

/// Peak energy consumption rating: watts per Gbps at sustained peak load.
pub fn compute_ecr(energy: AvgPower, throughput: Throughput) -> Result<MetricResult, MetricError> {
    if throughput.value() == 0.0 {
        return Err(MetricError::ZeroThroughput);
    }
    Ok(MetricResult::new(
        MetricKind::Ecr,
        energy.value() / throughput.value(),
        [("energy_w", energy.value()), ("throughput_gbps", throughput.value())],
    ))
}

/// Weighted power over the 0/50/100% load points with the operator binding:
/// `alpha` weights idle, `beta` half load, `epsilon` full load.
fn three_point_power(e_idle: AvgPower, e_half: AvgPower, e_full: AvgPower, w: &WeightProfile) -> f64 {
    w.alpha * e_idle.value() + w.beta * e_half.value() + w.epsilon * e_full.value()
}

/// Logarithmic variable-load rating, `-log10(P / T)` with P in watts and T in
/// Gbps. Only the ordering of values is meaningful.
pub fn compute_teeer(
    e_idle: AvgPower,
    e_half: AvgPower,
    e_full: AvgPower,
    throughput: Throughput,
    weights: &WeightProfile,
) -> Result<MetricResult, MetricError> {
    if throughput.value() == 0.0 {
        return Err(MetricError::ZeroThroughput);
    }
    let p = three_point_power(e_idle, e_half, e_full, weights);
    if p <= 0.0 {
        return Err(MetricError::NonPositivePower(p));
    }
    Ok(MetricResult::new(
        MetricKind::Teeer,
        -(p / throughput.value()).log10(),
        [
            ("weighted_power_w", p),
            ("throughput_gbps", throughput.value()),
            ("alpha", weights.alpha),
            ("beta", weights.beta),
            ("epsilon", weights.epsilon),
        ],
    ))
}

/// Maximum throughput over three-point weighted power.
///
/// Because the weighted power sits below full-load power on any device that
/// saves energy at lower load, this ratio exceeds `1 / ECR`. It is kept
/// exactly as defined so that overstatement can be shown.
pub fn compute_teer_atis(
    e_idle: AvgPower,
    e_half: AvgPower,
    e_full: AvgPower,
    max_throughput: Throughput,
    weights: &WeightProfile,
) -> Result<MetricResult, MetricError> {
    let p = three_point_power(e_idle, e_half, e_full, weights);
    if p <= 0.0 {
        return Err(MetricError::NonPositivePower(p));
    }
    Ok(MetricResult::new(
        MetricKind::TeerAtis,
        max_throughput.value() / p,
        [
            ("weighted_power_w", p),
            ("throughput_gbps", max_throughput.value()),
            ("alpha", weights.alpha),
            ("beta", weights.beta),
            ("epsilon", weights.epsilon),
        ],
    ))
}

/// Variable-load efficiency over a full / reduced / idle cycle. The idle
/// phase contributes energy but no throughput.
pub fn compute_eer_vl(
    t_full: Throughput,
    t_reduced: Throughput,
    e_full: AvgPower,
    e_reduced: AvgPower,
    e_idle: AvgPower,
    weights: &WeightProfile,
) -> Result<MetricResult, MetricError> {
    if t_reduced.value() > t_full.value() {
        return Err(MetricError::ReducedExceedsFull { reduced: t_reduced.value(), full: t_full.value() });
    }
    let num = weights.alpha * t_full.value() + weights.beta * t_reduced.value();
    let den = weights.alpha * e_full.value() + weights.beta * e_reduced.value() + weights.epsilon * e_idle.value();
    if den <= 0.0 {
        return Err(MetricError::NonPositivePower(den));
    }
    Ok(MetricResult::new(
        MetricKind::EerVl,
        num / den,
        [
            ("t_full_gbps", t_full.value()),
            ("t_reduced_gbps", t_reduced.value()),
            ("e_full_w", e_full.value()),
            ("e_reduced_w", e_reduced.value()),
            ("e_idle_w", e_idle.value()),
            ("alpha", weights.alpha),
            ("beta", weights.beta),
            ("epsilon", weights.epsilon),
        ],
    ))
}

/// Extended-idle efficiency over three explicit power states. There is no
/// zero-utilization phase; every phase contributes throughput.
#[allow(clippy::too_many_arguments)]
pub fn compute_eer_ex(
    t_full: Throughput,
    t_r1: Throughput,
    t_r2: Throughput,
    e_full: AvgPower,
    e_r1: AvgPower,
    e_r2: AvgPower,
    weights: &WeightProfile,
) -> Result<MetricResult, MetricError> {
    if t_r2.value() > t_r1.value() || t_r1.value() > t_full.value() {
        return Err(MetricError::StateOrderViolation { full: t_full.value(), r1: t_r1.value(), r2: t_r2.value() });
    }
    let num = weights.alpha * t_full.value() + weights.beta * t_r1.value() + weights.epsilon * t_r2.value();
    let den = weights.alpha * e_full.value() + weights.beta * e_r1.value() + weights.epsilon * e_r2.value();
    if den <= 0.0 {
        return Err(MetricError::NonPositivePower(den));
    }
    Ok(MetricResult::new(
        MetricKind::EerEx,
        num / den,
        [
            ("t_full_gbps", t_full.value()),
            ("t_r1_gbps", t_r1.value()),
            ("t_r2_gbps", t_r2.value()),
            ("e_full_w", e_full.value()),
            ("e_r1_w", e_r1.value()),
            ("e_r2_w", e_r2.value()),
            ("alpha", weights.alpha),
            ("beta", weights.beta),
            ("epsilon", weights.epsilon),
        ],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllowanceVerdict {
    pub ceiling: AvgPower,
    pub measured: AvgPower,
    pub pass: bool,
}

impl AllowanceVerdict {
    pub fn to_metric(self) -> MetricResult {
        MetricResult::new(
            MetricKind::Allowance,
            self.ceiling.value(),
            [("measured_w", self.measured.value()), ("pass", if self.pass { 1.0 } else { 0.0 })],
        )
    }
}

/// Power ceiling as the plain sum of per-interface allowances.
pub fn allowance_budget(
    interface_counts: &BTreeMap<String, u32>,
    table: &AllowanceTable,
    measured: AvgPower,
) -> Result<AllowanceVerdict, MetricError> {
    let mut ceiling = 0.0;
    for (class, &count) in interface_counts {
        let allowance = table.get(class).ok_or_else(|| MetricError::UnknownInterfaceClass(class.clone()))?;
        ceiling += f64::from(count) * allowance;
    }
    let ceiling = AvgPower::try_new(ceiling)?;
    Ok(AllowanceVerdict { ceiling, measured, pass: measured.value() <= ceiling.value() })
}

/// Packet-size weighted peak throughput: a convex combination of per-size NDRs.
pub fn weighted_peak_throughput(
    per_size_ndr: &BTreeMap<u32, Throughput>,
    weights: &PacketSizeWeights,
) -> Result<MetricResult, MetricError> {
    let mut total = 0.0;
    for &(size, w) in weights.entries() {
        let ndr = per_size_ndr.get(&size).ok_or(MetricError::MissingPacketSize(size))?;
        total += w * ndr.value();
    }
    let mut result = MetricResult::new(MetricKind::WeightedPeak, total, []);
    for &(size, w) in weights.entries() {
        result.inputs.insert(format!("ndr_{size}b_gbps"), per_size_ndr[&size].value());
        result.inputs.insert(format!("weight_{size}b"), w);
    }
    Ok(result)
}
