use super::{DeviceModel, SimError};
use crate::mean::StepMean;
use crate::measurement::MeasurementSample;
use crate::metrics::{AvgPower, Throughput};

pub const DEFAULT_STEP_S: f64 = 0.1;

/// Fixed-step simulation clock. Time is kept as an integer tick count so that
/// schedules and latencies land on exact steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    tick: u64,
    step_s: f64,
}

impl SimClock {
    pub fn new(step_s: f64) -> Result<Self, SimError> {
        if !(step_s.is_finite() && step_s > 0.0) {
            return Err(SimError::InvalidStep(step_s));
        }
        Ok(Self { tick: 0, step_s })
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn step_s(&self) -> f64 {
        self.step_s
    }

    pub fn now_s(&self) -> f64 {
        self.tick as f64 * self.step_s
    }

    /// Number of whole steps closest to `seconds`.
    pub fn steps_for(&self, seconds: f64) -> u64 {
        (seconds / self.step_s).round().max(0.0) as u64
    }

    /// Steps needed to cover `seconds`, rounding up.
    fn steps_covering(&self, seconds: f64) -> u64 {
        (seconds / self.step_s - 1e-9).ceil().max(0.0) as u64
    }

    fn advance(&mut self) {
        self.tick += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Transition {
    to: u32,
    complete_tick: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CheatEvent {
    tick: u64,
    target: u32,
}

/// What the device did during one simulation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReading {
    pub t_s: f64,
    pub offered: f64,
    pub delivered: f64,
    /// Deliverable rate at this packet size during the step.
    pub capacity: f64,
    pub power_w: f64,
    pub state: u32,
    pub in_transition: bool,
}

/// Stateful simulated device under test.
///
/// The effective power state changes only when a transition completes. While
/// a transition is pending the device can deliver no more than the
/// lower-capacity endpoint allows, and draws power on the curve of the state
/// it is leaving.
#[derive(Debug, Clone)]
pub struct Device {
    model: DeviceModel,
    clock: SimClock,
    state: u32,
    pending: Option<Transition>,
    /// Seconds the device had already been powered on when the clock started.
    on_offset_s: f64,
    warmed_up: bool,
    cheat_events: Vec<CheatEvent>,
}

impl Device {
    /// A device that was just powered on (cold, if it has a warm-up model).
    ///
    /// Panics if `model` fails [`DeviceModel::validate`]; [`Device::with_step`]
    /// reports that as an error instead.
    pub fn new(model: DeviceModel) -> Self {
        Self::with_step(model, DEFAULT_STEP_S).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn with_step(model: DeviceModel, step_s: f64) -> Result<Self, SimError> {
        let issues = model.validate();
        if !issues.is_empty() {
            return Err(SimError::InvalidModel {
                path: model.name.clone(),
                line: 0,
                column: 0,
                message: issues.join("; "),
            });
        }
        let clock = SimClock::new(step_s)?;
        let mut cheat_events = Vec::new();
        if let Some(cheat) = &model.cheat {
            for &(start, end, target) in &cheat.schedule {
                cheat_events.push(CheatEvent { tick: clock.steps_for(start), target });
                cheat_events.push(CheatEvent { tick: clock.steps_for(end), target: 0 });
            }
        }
        let warmed_up = model.warmup.is_none();
        let mut device = Self { model, clock, state: 0, pending: None, on_offset_s: 0.0, warmed_up, cheat_events };
        device.fire_events();
        Ok(device)
    }

    /// A device that has been running long enough to be thermally steady.
    pub fn preconditioned(model: DeviceModel) -> Self {
        let mut d = Self::new(model);
        d.on_offset_s = f64::INFINITY;
        d.warmed_up = true;
        d
    }

    pub fn model(&self) -> &DeviceModel {
        &self.model
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    pub fn now_s(&self) -> f64 {
        self.clock.now_s()
    }

    pub fn current_state(&self) -> u32 {
        self.state
    }

    pub fn pending_state(&self) -> Option<u32> {
        self.pending.map(|p| p.to)
    }

    pub fn in_transition(&self) -> bool {
        self.pending.is_some()
    }

    /// True when the device has no warm-up drift or a warm-up procedure has
    /// certified it stable.
    pub fn is_warm(&self) -> bool {
        self.warmed_up
    }

    pub fn mark_warm(&mut self) {
        self.warmed_up = true;
    }

    pub fn ndr(&self, packet_size_bytes: u32) -> Result<Throughput, SimError> {
        self.model.ndr(packet_size_bytes)
    }

    /// Capacity available right now as a fraction of full NDR.
    pub fn capacity_fraction(&self) -> f64 {
        let id = match self.pending {
            Some(p) => p.to.max(self.state),
            None => self.state,
        };
        self.model.states[id as usize].capacity_fraction
    }

    pub fn warmup_factor(&self, at_time_s: f64) -> f64 {
        match &self.model.warmup {
            Some(w) => w.factor(at_time_s + self.on_offset_s),
            None => 1.0,
        }
    }

    /// Power at `load_fraction` of the effective state's capacity, including
    /// warm-up drift at `at_time_s`.
    pub fn instantaneous_power(&self, load_fraction: f64, at_time_s: f64) -> f64 {
        let steady = self.model.states[self.state as usize].curve.power_at(load_fraction);
        steady * self.warmup_factor(at_time_s)
    }

    /// Requests a power state change and returns the time at which it takes
    /// effect. Moving to a deeper state costs the target's enter latency;
    /// moving back costs the current state's exit latency.
    pub fn set_power_state(&mut self, state_id: u32) -> Result<f64, SimError> {
        if self.model.state(state_id).is_none() {
            return Err(SimError::UnknownState(state_id));
        }
        if let Some(p) = self.pending {
            if p.to == state_id {
                return Ok(p.complete_tick as f64 * self.clock.step_s);
            }
            // an interrupted transition settles in its lower-capacity endpoint first
            self.state = self.state.max(p.to);
            self.pending = None;
        }
        if state_id == self.state {
            return Ok(self.now_s());
        }
        let latency = if state_id > self.state {
            self.model.states[state_id as usize].enter_latency_s
        } else {
            self.model.states[self.state as usize].exit_latency_s
        };
        let steps = self.clock.steps_covering(latency);
        if steps == 0 {
            self.state = state_id;
            return Ok(self.now_s());
        }
        let complete_tick = self.clock.tick + steps;
        self.pending = Some(Transition { to: state_id, complete_tick });
        Ok(complete_tick as f64 * self.clock.step_s)
    }

    /// Advances one step, applying scheduled events and finishing transitions.
    pub fn tick(&mut self) {
        self.clock.advance();
        self.fire_events();
    }

    fn fire_events(&mut self) {
        let now = self.clock.tick;
        let due: Vec<u32> = self.cheat_events.iter().filter(|e| e.tick == now).map(|e| e.target).collect();
        for target in due {
            // targets were validated at construction
            let _ = self.set_power_state(target);
        }
        if let Some(p) = self.pending {
            if p.complete_tick <= now {
                self.state = p.to;
                self.pending = None;
            }
        }
    }

    /// Offers traffic for one step and advances the clock.
    pub fn step(&mut self, offered: Throughput, packet_size_bytes: u32) -> Result<StepReading, SimError> {
        if offered.value() > self.model.line_rate.value() {
            return Err(SimError::OfferedExceedsLineRate {
                offered: offered.value(),
                line_rate: self.model.line_rate.value(),
            });
        }
        let ndr = self.ndr(packet_size_bytes)?.value();
        let capacity = ndr * self.capacity_fraction();
        let delivered = offered.value().min(capacity);
        let own_capacity = ndr * self.model.states[self.state as usize].capacity_fraction;
        let utilization = if own_capacity > 0.0 { (delivered / own_capacity).min(1.0) } else { 0.0 };
        let t_s = self.now_s();
        let reading = StepReading {
            t_s,
            offered: offered.value(),
            delivered,
            capacity,
            power_w: self.instantaneous_power(utilization, t_s),
            state: self.state,
            in_transition: self.pending.is_some(),
        };
        self.tick();
        Ok(reading)
    }

    /// Offers a constant load for `duration_s` and reports the window average.
    pub fn offer_load(
        &mut self,
        offered: Throughput,
        packet_size_bytes: u32,
        duration_s: f64,
    ) -> Result<MeasurementSample, SimError> {
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(SimError::NonPositiveDuration(duration_s));
        }
        let ndr = self.ndr(packet_size_bytes)?;
        let steps = self.clock.steps_for(duration_s).max(1);
        let mut lost = StepMean::default();
        let mut power = StepMean::default();
        for _ in 0..steps {
            let r = self.step(offered, packet_size_bytes)?;
            lost.push(r.offered - r.delivered);
            power.push(r.power_w);
        }
        // loss is averaged rather than delivery so a lossless window reports
        // delivered == offered exactly
        let delivered = (offered.value() - lost.mean()).clamp(0.0, offered.value());
        Ok(MeasurementSample {
            load_fraction: (offered.value() / ndr.value()).clamp(0.0, 1.0),
            offered,
            delivered: Throughput::gbps(delivered),
            power: AvgPower::watts(power.mean()),
            duration_s: steps as f64 * self.clock.step_s,
            packet_size_bytes,
        })
    }
}
