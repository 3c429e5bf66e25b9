use std::fmt;

use serde::{Deserialize, Serialize};

use super::MetricError;

/// Data rate in gigabits per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Throughput(f64);

impl Throughput {
    pub const ZERO: Throughput = Throughput(0.0);

    pub fn try_new(gbps: f64) -> Result<Self, MetricError> {
        if gbps.is_finite() && gbps >= 0.0 {
            Ok(Self(gbps))
        } else {
            Err(MetricError::InvalidQuantity { what: "throughput", value: gbps })
        }
    }

    /// Panics on negative or non-finite input.
    pub fn gbps(gbps: f64) -> Self {
        Self::try_new(gbps).expect("throughput must be finite and non-negative")
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Throughput {
    type Error = MetricError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::try_new(value)
    }
}

impl From<Throughput> for f64 {
    fn from(t: Throughput) -> f64 {
        t.0
    }
}

impl fmt::Display for Throughput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} Gbps", self.0)
    }
}

/// Time-averaged electrical power in watts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AvgPower(f64);

impl AvgPower {
    pub const ZERO: AvgPower = AvgPower(0.0);

    pub fn try_new(watts: f64) -> Result<Self, MetricError> {
        if watts.is_finite() && watts >= 0.0 {
            Ok(Self(watts))
        } else {
            Err(MetricError::InvalidQuantity { what: "power", value: watts })
        }
    }

    /// Panics on negative or non-finite input.
    pub fn watts(watts: f64) -> Self {
        Self::try_new(watts).expect("power must be finite and non-negative")
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for AvgPower {
    type Error = MetricError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::try_new(value)
    }
}

impl From<AvgPower> for f64 {
    fn from(p: AvgPower) -> f64 {
        p.0
    }
}

impl fmt::Display for AvgPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} W", self.0)
    }
}
