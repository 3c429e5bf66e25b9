use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ExTestPlan, NdrSearchConfig, OrchestratorError, PeakConfig, VlTestPlan, WarmupConfig};
use crate::mean::StepMean;
use crate::measurement::{MeasurementSample, MeasurementSet, PhaseLabel, ProbeOutcome, Procedure};
use crate::metrics::{self, AvgPower, MetricResult, PacketSizeWeights, Throughput};
use crate::sim::Device;

pub const RETURN_TO_FULL_CAPACITY_VIOLATION: &str = "return-to-full-capacity violation";
pub const WARMUP_NOT_MET: &str = "warm-up precondition not met";
pub const WARMUP_SKIPPED_TAG: &str = "warmup-skipped";

/// Allowed shortfall from NDR during a peak energy run.
pub const PEAK_THROUGHPUT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct WarmupReport {
    pub elapsed_s: f64,
    pub readings: usize,
    pub final_power: AvgPower,
}

/// Runs the device at full load until its power readings settle.
///
/// Readings are window averages of `reading_interval_s` each. The device is
/// marked warm on success.
pub fn warmup_until_stable(device: &mut Device, cfg: &WarmupConfig) -> Result<WarmupReport, OrchestratorError> {
    cfg.validate()?;
    let packet_size = *device.model().ndr_by_packet_size.keys().next().expect("validated model has a packet size");
    let line_rate = device.model().line_rate;
    let start = device.now_s();
    let mut window: VecDeque<f64> = VecDeque::with_capacity(cfg.window_samples);
    let mut readings = 0;
    let mut last_range = f64::NAN;
    loop {
        let elapsed = device.now_s() - start;
        if elapsed + cfg.reading_interval_s > cfg.timeout_s + 1e-9 {
            return Err(OrchestratorError::WarmupTimeout { elapsed_s: elapsed, last_range });
        }
        let sample = device.offer_load(line_rate, packet_size, cfg.reading_interval_s)?;
        readings += 1;
        if window.len() == cfg.window_samples {
            window.pop_front();
        }
        window.push_back(sample.power.value());
        if window.len() == cfg.window_samples {
            let max = window.iter().copied().fold(f64::MIN, f64::max);
            let min = window.iter().copied().fold(f64::MAX, f64::min);
            last_range = if max > 0.0 { (max - min) / max } else { 0.0 };
            if last_range < cfg.stability_tol {
                device.mark_warm();
                return Ok(WarmupReport { elapsed_s: device.now_s() - start, readings, final_power: sample.power });
            }
        }
    }
}

fn trial_passes(device: &mut Device, cfg: &NdrSearchConfig, rate: f64) -> Result<bool, OrchestratorError> {
    let s = device.offer_load(Throughput::gbps(rate), cfg.packet_size_bytes, cfg.trial_duration_s)?;
    let loss = if s.offered.value() > 0.0 { s.loss() / s.offered.value() } else { 0.0 };
    Ok(loss <= cfg.loss_tolerance)
}

/// Non-drop-rate search by bisection over `[0, line_rate]`.
///
/// Returns the highest passing offered load once the bracket is narrower than
/// `resolution * line_rate`. The lower (passing) bound is returned, so the
/// result never overstates throughput.
pub fn find_ndr(device: &mut Device, cfg: &NdrSearchConfig) -> Result<Throughput, OrchestratorError> {
    cfg.validate()?;
    device.ndr(cfg.packet_size_bytes)?;
    let line_rate = device.model().line_rate.value();
    if trial_passes(device, cfg, line_rate)? {
        return Ok(Throughput::gbps(line_rate));
    }
    let width = cfg.resolution * line_rate;
    let (mut lo, mut hi) = (0.0_f64, line_rate);
    while hi - lo >= width {
        let mid = lo + (hi - lo) / 2.0;
        if trial_passes(device, cfg, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(OrchestratorError::NoPassingRate { packet_size_bytes: cfg.packet_size_bytes });
    }
    Ok(Throughput::gbps(lo))
}

/// Sustained peak-load run at `ndr`, returning the full window sample.
pub fn peak_sample(
    device: &mut Device,
    ndr: Throughput,
    packet_size_bytes: u32,
    duration_s: f64,
) -> Result<MeasurementSample, OrchestratorError> {
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(OrchestratorError::InvalidConfig(format!("peak duration must be positive, got {duration_s}")));
    }
    let sample = device.offer_load(ndr, packet_size_bytes, duration_s)?;
    if sample.delivered.value() < (1.0 - PEAK_THROUGHPUT_TOLERANCE) * ndr.value() {
        return Err(OrchestratorError::UnexpectedLoss { delivered: sample.delivered.value(), ndr: ndr.value() });
    }
    Ok(sample)
}

/// Average power while forwarding exactly `ndr`.
pub fn measure_peak_energy(
    device: &mut Device,
    ndr: Throughput,
    packet_size_bytes: u32,
    duration_s: f64,
) -> Result<AvgPower, OrchestratorError> {
    Ok(peak_sample(device, ndr, packet_size_bytes, duration_s)?.power)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakSuiteResult {
    pub ndr: BTreeMap<u32, Throughput>,
    pub ecr: BTreeMap<u32, MetricResult>,
    pub weighted: MetricResult,
    pub set: MeasurementSet,
}

/// NDR search plus peak energy run for each packet size, with both the
/// per-size ECR and the packet-size weighted peak throughput.
pub fn run_peak_suite(
    device: &mut Device,
    weights: &PacketSizeWeights,
    cfg: &PeakConfig,
) -> Result<PeakSuiteResult, OrchestratorError> {
    let mut ndr_map = BTreeMap::new();
    let mut ecr = BTreeMap::new();
    let mut set: Option<MeasurementSet> = None;
    for size in weights.packet_sizes() {
        let search = NdrSearchConfig { packet_size_bytes: size, ..cfg.ndr_search };
        let ndr = find_ndr(device, &search)?;
        let sample = peak_sample(device, ndr, size, cfg.duration_s)?;
        ecr.insert(size, metrics::compute_ecr(sample.power, sample.delivered)?);
        ndr_map.insert(size, ndr);
        set.get_or_insert_with(|| MeasurementSet::new(device.model().name.clone(), Procedure::Peak, ndr))
            .push(PhaseLabel::Full, sample);
    }
    let mut set = set.expect("packet size weights are never empty");
    if !device.is_warm() {
        set.tags.push(WARMUP_SKIPPED_TAG.to_string());
    }
    let weighted = metrics::weighted_peak_throughput(&ndr_map, weights)?;
    Ok(PeakSuiteResult { ndr: ndr_map, ecr, weighted, set })
}

/// Phase statistics that skip probe steps.
#[derive(Default)]
struct PhaseAccumulator {
    lost: StepMean,
    power: StepMean,
}

impl PhaseAccumulator {
    fn sample(
        &self,
        offered: Throughput,
        ndr: Throughput,
        packet_size_bytes: u32,
        step_s: f64,
    ) -> Result<MeasurementSample, OrchestratorError> {
        let delivered = (offered.value() - self.lost.mean()).clamp(0.0, offered.value());
        let load_fraction = if ndr.value() > 0.0 { (offered.value() / ndr.value()).clamp(0.0, 1.0) } else { 0.0 };
        MeasurementSample::new(
            load_fraction,
            offered,
            Throughput::gbps(delivered),
            AvgPower::watts(self.power.mean()),
            self.power.count() as f64 * step_s,
            packet_size_bytes,
        )
        .map_err(|e| OrchestratorError::InvalidConfig(e.to_string()))
    }
}

/// Full, reduced and idle phases with optional return-to-full-capacity probes.
///
/// Each non-full phase gets one full-NDR burst at a uniformly random offset
/// drawn from `orchestrator_seed`. A burst that delivers less than
/// `(1 - throughput_tolerance) * ndr` invalidates the set. Burst steps are not
/// part of the phase averages, so a compliant device reports the same phase
/// figures with and without probing.
///
/// An invalid set is a normal return value; errors are reserved for
/// misconfiguration.
pub fn run_variable_load_test(
    device: &mut Device,
    ndr: Throughput,
    plan: &VlTestPlan,
    orchestrator_seed: u64,
) -> Result<MeasurementSet, OrchestratorError> {
    plan.validate()?;
    let size = plan.packet_size_bytes;
    device.ndr(size)?;
    let mut set = MeasurementSet::new(device.model().name.clone(), Procedure::VariableLoad, ndr);
    set.weights = Some(plan.weights);
    if !plan.warmup_required {
        set.tags.push(WARMUP_SKIPPED_TAG.to_string());
    } else if !device.is_warm() {
        set.invalidate(WARMUP_NOT_MET);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(orchestrator_seed);
    let step_s = device.clock().step_s();
    let probe_steps = device.clock().steps_for(plan.probe.response_window_s).max(1);
    let required = Throughput::gbps((1.0 - plan.probe.throughput_tolerance) * ndr.value());
    let d = &plan.phase_duration_s;
    let phases = [
        (PhaseLabel::Full, 1.0, d.full),
        (PhaseLabel::Reduced, plan.weights.reduced_load_fraction, d.reduced),
        (PhaseLabel::Idle, 0.0, d.idle),
    ];

    for (label, fraction, duration) in phases {
        let steps = device.clock().steps_for(duration).max(1);
        let offered = Throughput::gbps(fraction * ndr.value());
        let probe_at = if plan.probe.enabled && label != PhaseLabel::Full {
            Some(rng.gen_range(0..=steps.saturating_sub(probe_steps)))
        } else {
            None
        };
        let mut acc = PhaseAccumulator::default();
        let mut burst = StepMean::default();
        let mut burst_start = 0.0;
        for i in 0..steps {
            let in_probe = probe_at.is_some_and(|p| i >= p && i < p + probe_steps);
            if in_probe {
                let r = device.step(ndr, size)?;
                if burst.count() == 0 {
                    burst_start = r.t_s;
                }
                burst.push(r.delivered);
            } else {
                let r = device.step(offered, size)?;
                acc.lost.push(r.offered - r.delivered);
                acc.power.push(r.power_w);
            }
        }
        if acc.power.count() > 0 {
            set.push(label, acc.sample(offered, ndr, size, step_s)?);
        }
        if probe_at.is_some() {
            let delivered = Throughput::gbps(burst.mean().min(ndr.value()));
            let passed = delivered.value() >= required.value();
            set.probes.push(ProbeOutcome {
                phase: label,
                start_s: burst_start,
                window_s: burst.count() as f64 * step_s,
                delivered,
                required,
                passed,
            });
            if !passed {
                set.invalidate(RETURN_TO_FULL_CAPACITY_VIOLATION);
            }
        }
    }
    Ok(set)
}

/// Steady-state runs in three explicit power states. Transition intervals
/// are stepped through but left out of the phase averages, and the device is
/// returned to state 0 afterwards.
pub fn run_extended_idle_test(
    device: &mut Device,
    ndr: Throughput,
    plan: &ExTestPlan,
) -> Result<MeasurementSet, OrchestratorError> {
    for p in &plan.state_schedule {
        if device.model().state(p.state_id).is_none() {
            return Err(crate::sim::SimError::UnknownState(p.state_id).into());
        }
    }
    plan.validate()?;
    let size = plan.packet_size_bytes;
    device.ndr(size)?;
    let mut set = MeasurementSet::new(device.model().name.clone(), Procedure::ExtendedIdle, ndr);
    set.weights = Some(plan.weights);
    if !device.is_warm() {
        set.tags.push(WARMUP_SKIPPED_TAG.to_string());
    }
    let step_s = device.clock().step_s();
    for phase in &plan.state_schedule {
        device.set_power_state(phase.state_id)?;
        let capacity = device.model().states[phase.state_id as usize].capacity_fraction;
        let offered = Throughput::gbps(phase.load_fraction_of_state_capacity * capacity * ndr.value());
        while device.in_transition() {
            device.step(offered, size)?;
        }
        let mut acc = PhaseAccumulator::default();
        for _ in 0..device.clock().steps_for(phase.phase_duration_s).max(1) {
            let r = device.step(offered, size)?;
            acc.lost.push(r.offered - r.delivered);
            acc.power.push(r.power_w);
        }
        let label = if phase.state_id == 0 { PhaseLabel::Full } else { PhaseLabel::State(phase.state_id) };
        set.push(label, acc.sample(offered, ndr, size, step_s)?);
    }
    device.set_power_state(0)?;
    while device.in_transition() {
        device.tick();
    }
    Ok(set)
}
