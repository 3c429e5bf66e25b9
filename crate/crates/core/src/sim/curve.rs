use serde::{Deserialize, Serialize};

/// Power draw as a piecewise-linear function of utilization.
///
/// Encoded in JSON as an array of `[load_fraction, watts]` pairs. Knots are
/// reproduced exactly; between knots the value is linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PowerCurve {
    points: Vec<(f64, f64)>,
}

impl PowerCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, String> {
        if points.len() < 2 {
            return Err("curve needs at least two points (idle and full load)".into());
        }
        if points[0].0 != 0.0 {
            return Err(format!("first load fraction must be 0 (idle), got {}", points[0].0));
        }
        let last = points[points.len() - 1].0;
        if last != 1.0 {
            return Err(format!("last load fraction must be 1 (full load), got {last}"));
        }
        for &(load, watts) in &points {
            if !load.is_finite() || !watts.is_finite() || watts < 0.0 {
                return Err(format!("point ({load}, {watts}) must have finite, non-negative power"));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(format!("load fractions must be strictly increasing ({} then {})", w[0].0, w[1].0));
            }
            if w[1].1 < w[0].1 {
                return Err(format!(
                    "power must be nondecreasing in load ({} W at {} then {} W at {})",
                    w[0].1, w[0].0, w[1].1, w[1].0
                ));
            }
        }
        Ok(Self { points })
    }

    /// Same shape at every load: a device with no energy elasticity.
    pub fn flat(watts: f64) -> Result<Self, String> {
        Self::new(vec![(0.0, watts), (1.0, watts)])
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn idle_power(&self) -> f64 {
        self.points[0].1
    }

    pub fn full_power(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    /// Power at `load`, clamped to [0, 1].
    pub fn power_at(&self, load: f64) -> f64 {
        let load = if load.is_nan() { 0.0 } else { load.clamp(0.0, 1.0) };
        // index of the first knot strictly above `load`
        let hi = self.points.partition_point(|&(x, _)| x <= load);
        if hi == 0 {
            return self.points[0].1;
        }
        let (x0, y0) = self.points[hi - 1];
        if load == x0 || hi == self.points.len() {
            return y0;
        }
        let (x1, y1) = self.points[hi];
        let y = y0 + (y1 - y0) * ((load - x0) / (x1 - x0));
        y.clamp(y0, y1)
    }
}

impl TryFrom<Vec<(f64, f64)>> for PowerCurve {
    type Error = String;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Self::new(points)
    }
}

impl From<PowerCurve> for Vec<(f64, f64)> {
    fn from(c: PowerCurve) -> Self {
        c.points
    }
}
