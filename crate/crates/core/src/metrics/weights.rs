use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricError;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Shares of a test cycle spent in each load phase.
///
/// For the variable-load and extended-idle ratios `alpha` is the full-load
/// share, `beta` the reduced-load share and `epsilon` the idle (or second
/// reduced state) share. The logarithmic variable-load rating binds the same
/// three weights to the 0%, 50% and 100% load points instead; see
/// [`compute_teeer`](super::compute_teeer).
///
/// There is no default profile. Every caller passes weights explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightProfile")]
pub struct WeightProfile {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Fraction of NDR offered during the reduced phase, in (0, 1).
    pub reduced_load_fraction: f64,
}

#[derive(Deserialize)]
struct RawWeightProfile {
    alpha: f64,
    beta: f64,
    epsilon: f64,
    reduced_load_fraction: f64,
}

impl TryFrom<RawWeightProfile> for WeightProfile {
    type Error = MetricError;

    fn try_from(raw: RawWeightProfile) -> Result<Self, Self::Error> {
        WeightProfile::new(raw.alpha, raw.beta, raw.epsilon, raw.reduced_load_fraction)
    }
}

impl WeightProfile {
    pub fn new(alpha: f64, beta: f64, epsilon: f64, reduced_load_fraction: f64) -> Result<Self, MetricError> {
        for (name, w) in [("alpha", alpha), ("beta", beta), ("epsilon", epsilon)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(MetricError::InvalidWeights(format!("{name} = {w} is outside [0, 1]")));
            }
        }
        let sum = alpha + beta + epsilon;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MetricError::InvalidWeights(format!("alpha + beta + epsilon = {sum}, must sum to 1")));
        }
        if !(reduced_load_fraction > 0.0 && reduced_load_fraction < 1.0) {
            return Err(MetricError::InvalidWeights(format!(
                "reduced_load_fraction = {reduced_load_fraction} is outside (0, 1)"
            )));
        }
        Ok(Self { alpha, beta, epsilon, reduced_load_fraction })
    }

    /// The single published operator profile: 0.35 / 0.4 / 0.25 on the
    /// 0% / 50% / 100% load points.
    pub fn verizon() -> Self {
        Self { alpha: 0.35, beta: 0.4, epsilon: 0.25, reduced_load_fraction: 0.5 }
    }

    /// Same profile with different phase weights, keeping the reduced-load level.
    pub fn with_weights(self, alpha: f64, beta: f64, epsilon: f64) -> Result<Self, MetricError> {
        Self::new(alpha, beta, epsilon, self.reduced_load_fraction)
    }
}

/// Convex weights over packet sizes for a weighted peak throughput.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, f64)>", into = "Vec<(u32, f64)>")]
pub struct PacketSizeWeights {
    entries: Vec<(u32, f64)>,
}

impl PacketSizeWeights {
    pub fn new(entries: Vec<(u32, f64)>) -> Result<Self, MetricError> {
        if entries.is_empty() {
            return Err(MetricError::InvalidWeights("packet size weights are empty".into()));
        }
        for window in entries.windows(2) {
            if window[1].0 <= window[0].0 {
                return Err(MetricError::InvalidWeights(format!(
                    "packet sizes must be strictly increasing ({} then {})",
                    window[0].0, window[1].0
                )));
            }
        }
        for &(size, w) in &entries {
            if size == 0 {
                return Err(MetricError::InvalidWeights("packet size must be positive".into()));
            }
            if !(0.0..=1.0).contains(&w) {
                return Err(MetricError::InvalidWeights(format!(
                    "weight {w} for {size}-byte packets is outside [0, 1]"
                )));
            }
        }
        let sum: f64 = entries.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MetricError::InvalidWeights(format!("packet size weights sum to {sum}, must sum to 1")));
        }
        Ok(Self { entries })
    }

    pub fn single(packet_size_bytes: u32) -> Self {
        Self { entries: vec![(packet_size_bytes, 1.0)] }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn packet_sizes(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|(s, _)| *s)
    }
}

impl TryFrom<Vec<(u32, f64)>> for PacketSizeWeights {
    type Error = MetricError;

    fn try_from(entries: Vec<(u32, f64)>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<PacketSizeWeights> for Vec<(u32, f64)> {
    fn from(w: PacketSizeWeights) -> Self {
        w.entries
    }
}

/// Per-interface power allowances, in watts, keyed by interface class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct AllowanceTable {
    entries: BTreeMap<String, f64>,
}

impl AllowanceTable {
    pub fn new(entries: BTreeMap<String, f64>) -> Result<Self, MetricError> {
        if let Some((class, w)) = entries.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(MetricError::InvalidAllowance { class: class.clone(), watts: *w });
        }
        Ok(Self { entries })
    }

    pub fn get(&self, class: &str) -> Option<f64> {
        self.entries.get(class).copied()
    }
}

impl TryFrom<BTreeMap<String, f64>> for AllowanceTable {
    type Error = MetricError;

    fn try_from(entries: BTreeMap<String, f64>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<AllowanceTable> for BTreeMap<String, f64> {
    fn from(t: AllowanceTable) -> Self {
        t.entries
    }
}
