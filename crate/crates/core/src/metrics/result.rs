use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "ECR")]
    Ecr,
    #[serde(rename = "TEEER")]
    Teeer,
    #[serde(rename = "TEER_ATIS")]
    TeerAtis,
    #[serde(rename = "EER_VL")]
    EerVl,
    #[serde(rename = "EER_EX")]
    EerEx,
    #[serde(rename = "ALLOWANCE")]
    Allowance,
    #[serde(rename = "WEIGHTED_PEAK")]
    WeightedPeak,
}

impl MetricKind {
    pub const ALL: [MetricKind; 7] = [
        MetricKind::Ecr,
        MetricKind::Teeer,
        MetricKind::TeerAtis,
        MetricKind::EerVl,
        MetricKind::EerEx,
        MetricKind::Allowance,
        MetricKind::WeightedPeak,
    ];

    pub fn units(self) -> Units {
        match self {
            MetricKind::Ecr => Units::WattsPerGbps,
            MetricKind::Teeer => Units::Dimensionless,
            MetricKind::TeerAtis | MetricKind::EerVl | MetricKind::EerEx => Units::GbpsPerWatt,
            MetricKind::Allowance => Units::Watts,
            MetricKind::WeightedPeak => Units::Gbps,
        }
    }

    /// Which way a class leader points.
    pub fn direction(self) -> RankDirection {
        match self {
            MetricKind::Ecr | MetricKind::Allowance => RankDirection::LowerIsBetter,
            _ => RankDirection::HigherIsBetter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Ecr => "ECR",
            MetricKind::Teeer => "TEEER",
            MetricKind::TeerAtis => "TEER_ATIS",
            MetricKind::EerVl => "EER_VL",
            MetricKind::EerEx => "EER_EX",
            MetricKind::Allowance => "ALLOWANCE",
            MetricKind::WeightedPeak => "WEIGHTED_PEAK",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = MetricError;

    /// Case-insensitive; accepts `-` in place of `_`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        MetricKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| MetricError::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    #[serde(rename = "W/Gbps")]
    WattsPerGbps,
    #[serde(rename = "dimensionless")]
    Dimensionless,
    #[serde(rename = "Gbps/W")]
    GbpsPerWatt,
    #[serde(rename = "W")]
    Watts,
    #[serde(rename = "Gbps")]
    Gbps,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::WattsPerGbps => "W/Gbps",
            Units::Dimensionless => "dimensionless",
            Units::GbpsPerWatt => "Gbps/W",
            Units::Watts => "W",
            Units::Gbps => "Gbps",
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankDirection {
    LowerIsBetter,
    HigherIsBetter,
}

/// A computed metric together with the named inputs it came from.
///
/// Units are always derived from the kind; deserializing a result whose
/// units disagree with its kind fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetricResult")]
pub struct MetricResult {
    pub kind: MetricKind,
    pub value: f64,
    pub units: Units,
    #[serde(default)]
    pub inputs: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawMetricResult {
    kind: MetricKind,
    value: f64,
    units: Units,
    #[serde(default)]
    inputs: BTreeMap<String, f64>,
}

impl TryFrom<RawMetricResult> for MetricResult {
    type Error = MetricError;

    fn try_from(raw: RawMetricResult) -> Result<Self, Self::Error> {
        if raw.units != raw.kind.units() {
            return Err(MetricError::UnitsMismatch { kind: raw.kind, units: raw.units });
        }
        Ok(MetricResult { kind: raw.kind, value: raw.value, units: raw.units, inputs: raw.inputs })
    }
}

impl MetricResult {
    pub(crate) fn new<const N: usize>(kind: MetricKind, value: f64, inputs: [(&str, f64); N]) -> Self {
        MetricResult {
            kind,
            value,
            units: kind.units(),
            inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

impl fmt::Display for MetricResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} {}", self.kind, self.value, self.units)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_kind_loosely() {
        assert_eq!("eer_vl".parse::<MetricKind>().unwrap(), MetricKind::EerVl);
        assert_eq!("EER-EX".parse::<MetricKind>().unwrap(), MetricKind::EerEx);
        assert_eq!("teer_atis".parse::<MetricKind>().unwrap(), MetricKind::TeerAtis);
        assert!("mpg".parse::<MetricKind>().is_err());
    }

    #[test]
    fn units_bound_to_kind() {
        let bad = r#"{"kind":"ECR","value":1.0,"units":"Gbps/W"}"#;
        assert!(serde_json::from_str::<MetricResult>(bad).is_err());
        let good = r#"{"kind":"ECR","value":1.0,"units":"W/Gbps"}"#;
        assert!(serde_json::from_str::<MetricResult>(good).is_ok());
    }
}
