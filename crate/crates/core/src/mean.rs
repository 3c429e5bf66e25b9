/// Window average accumulated as deviations from the first value, so a
/// constant series averages to exactly that constant.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct StepMean {
    base: Option<f64>,
    deviation_sum: f64,
    count: u64,
}

impl StepMean {
    pub(crate) fn push(&mut self, value: f64) {
        let base = *self.base.get_or_insert(value);
        self.deviation_sum += value - base;
        self.count += 1;
    }

    pub(crate) fn count(&self) -> u64 {
        self.count
    }

    pub(crate) fn mean(&self) -> f64 {
        match self.base {
            Some(base) => base + self.deviation_sum / self.count as f64,
            None => 0.0,
        }
    }
}
