use greenbench::fixtures;
use greenbench::metrics::Throughput;
use greenbench::sim::{Device, DeviceModel, PowerCurve, SimError, WarmupModel};
use proptest::prelude::*;

fn g(v: f64) -> Throughput {
    Throughput::gbps(v)
}

fn cold_table2(delta: f64, tau_s: f64) -> DeviceModel {
    let mut m = fixtures::table2_router();
    m.warmup = Some(WarmupModel { delta, tau_s });
    m
}

#[test]
fn full_state_forwards_ndr() {
    let mut d = Device::preconditioned(fixtures::table2_router());
    let s = d.offer_load(g(100.0), 1518, 5.0).unwrap();
    assert_eq!(s.delivered.value(), 100.0);
    assert_eq!(s.loss(), 0.0);
    assert_eq!(s.power.value(), 863.0);
}

#[test]
fn degraded_state_caps_delivery() {
    let mut d = Device::preconditioned(fixtures::cheater_downshift());
    d.set_power_state(1).unwrap();
    d.offer_load(g(0.0), 1518, 2.0).unwrap();
    assert_eq!(d.current_state(), 1);
    let s = d.offer_load(g(100.0), 1518, 1.0).unwrap();
    assert!((s.delivered.value() - 30.0).abs() < 1e-9);
}

#[test]
fn half_load_is_816_for_any_duration() {
    for secs in [0.1, 1.0, 37.3, 600.0] {
        let mut d = Device::preconditioned(fixtures::table2_router());
        assert_eq!(d.offer_load(g(50.0), 1518, secs).unwrap().power.value(), 816.0);
    }
}

#[test]
fn curve_interpolates_between_knots() {
    let d = Device::preconditioned(fixtures::table2_router());
    assert_eq!(d.instantaneous_power(0.3, 0.0), 801.0);
    assert!((d.instantaneous_power(0.2, 0.0) - 795.5).abs() < 1e-12);
}

#[test]
fn cold_start_power() {
    let d = Device::new(cold_table2(0.05, 1e6));
    assert!((d.instantaneous_power(1.0, 0.0) - 819.85).abs() < 1e-9);
}

#[test]
fn transition_latencies() {
    let mut d = Device::preconditioned(fixtures::three_state_router());
    d.offer_load(g(0.0), 1518, 100.0).unwrap();
    assert_eq!(d.set_power_state(1).unwrap(), 105.0);
    assert!(d.in_transition());
    d.offer_load(g(0.0), 1518, 5.0).unwrap();
    assert_eq!(d.current_state(), 1);
    assert!(!d.in_transition());
    let now = d.now_s();
    assert_eq!(d.set_power_state(1).unwrap(), now);
}

#[test]
fn exit_window_keeps_degraded_capacity() {
    let mut d = Device::preconditioned(fixtures::three_state_router());
    d.set_power_state(2).unwrap();
    d.offer_load(g(0.0), 1518, 30.0).unwrap();
    assert_eq!(d.current_state(), 2);
    let start = d.now_s();
    let done = d.set_power_state(0).unwrap();
    assert_eq!(done - start, 60.0);
    while d.now_s() < done {
        let r = d.step(g(100.0), 1518).unwrap();
        assert!((r.delivered - 10.0).abs() < 1e-9, "t={} delivered {}", r.t_s, r.delivered);
    }
    let r = d.step(g(100.0), 1518).unwrap();
    assert_eq!(r.delivered, 100.0);
}

#[test]
fn cheat_schedule_fires_at_exact_times() {
    let mut m = fixtures::cheater_downshift();
    m.cheat.as_mut().unwrap().schedule = vec![(10.0, 20.0, 1)];
    let mut d = Device::preconditioned(m);
    d.offer_load(g(0.0), 1518, 9.9).unwrap();
    assert!(!d.in_transition());
    d.offer_load(g(0.0), 1518, 0.1).unwrap();
    assert_eq!(d.pending_state(), Some(1));
    d.offer_load(g(0.0), 1518, 10.0).unwrap();
    assert_eq!(d.current_state(), 1);
    assert_eq!(d.pending_state(), Some(0));
}

#[test]
fn no_schedule_leaves_state_alone() {
    let mut d = Device::preconditioned(fixtures::table2_router());
    d.offer_load(g(10.0), 1518, 1000.0).unwrap();
    assert_eq!(d.current_state(), 0);
    assert!(!d.in_transition());
}

#[test]
fn errors() {
    let mut d = Device::preconditioned(fixtures::table2_router());
    assert!(matches!(d.set_power_state(3), Err(SimError::UnknownState(3))));
    assert!(matches!(d.offer_load(g(10.0), 512, 1.0), Err(SimError::PacketSizeUnknown(512))));
    assert!(matches!(d.offer_load(g(101.0), 1518, 1.0), Err(SimError::OfferedExceedsLineRate { .. })));
    assert!(matches!(d.offer_load(g(10.0), 1518, 0.0), Err(SimError::NonPositiveDuration(_))));
    assert!(Device::with_step(fixtures::table2_router(), 0.0).is_err());
}

#[test]
fn invalid_models_rejected() {
    let text = fixtures::TABLE2_ROUTER.replace("[0.5, 816.0]", "[0.5, 790.0]");
    let err = DeviceModel::from_json(&text).unwrap_err().to_string();
    assert!(err.contains("nondecreasing"), "{err}");
    let text = fixtures::CHEATER_DOWNSHIFT.replace("\"capacity_fraction\": 0.3", "\"capacity_fraction\": 1.5");
    let err = DeviceModel::from_json(&text).unwrap_err().to_string();
    assert!(err.contains("capacity_fraction"), "{err}");
    assert!(PowerCurve::new(vec![(0.0, 1.0)]).is_err());
    assert!(PowerCurve::new(vec![(0.1, 1.0), (1.0, 2.0)]).is_err());
}

#[test]
fn every_fixture_round_trips() {
    let models = [
        fixtures::table2_router(),
        fixtures::proportional_ideal(),
        fixtures::cheater_downshift(),
        fixtures::three_state_router(),
    ];
    for m in models.into_iter().chain(fixtures::table1_devices()) {
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(DeviceModel::from_json(&text).unwrap(), m);
    }
}

/// A load program: (state request, offered fraction of NDR, seconds).
fn program() -> impl Strategy<Value = Vec<(Option<u32>, f64, f64)>> {
    prop::collection::vec((prop::option::of(0u32..3), 0.0..=1.0f64, 0.1..30.0f64), 1..12)
}

fn run_program(d: &mut Device, prog: &[(Option<u32>, f64, f64)], mut check: impl FnMut(&Device, f64, f64, f64)) {
    for &(state, frac, secs) in prog {
        if let Some(s) = state {
            d.set_power_state(s).unwrap();
        }
        let steps = d.clock().steps_for(secs).max(1);
        for _ in 0..steps {
            let cap_before = d.capacity_fraction();
            let r = d.step(g(frac * 100.0), 1518).unwrap();
            check(d, cap_before, r.delivered, r.power_w);
            assert!(r.offered - r.delivered >= 0.0);
            if r.offered <= r.capacity {
                assert_eq!(r.offered, r.delivered);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_stays_in_bounds(prog in program(), delta in 0.0..0.2f64, tau in 1.0..1000.0f64) {
        let mut m = fixtures::three_state_router();
        m.warmup = Some(WarmupModel { delta, tau_s: tau });
        let lo = m.states.iter().map(|s| s.curve.idle_power()).fold(f64::INFINITY, f64::min) * (1.0 - delta);
        let hi = m.states.iter().map(|s| s.curve.full_power()).fold(0.0, f64::max);
        let mut d = Device::new(m);
        run_program(&mut d, &prog, |_, _, _, p| assert!(p >= lo - 1e-9 && p <= hi + 1e-9, "{p} outside [{lo}, {hi}]"));
    }

    #[test]
    fn transitions_never_add_capacity(prog in program()) {
        let mut d = Device::preconditioned(fixtures::three_state_router());
        let caps: Vec<f64> = d.model().states.iter().map(|s| s.capacity_fraction).collect();
        run_program(&mut d, &prog, |_, cap, delivered, _| {
            assert!(delivered <= cap * 100.0 + 1e-9);
            assert!(caps.contains(&cap));
        });
    }

    #[test]
    fn same_model_same_readings(prog in program()) {
        let mut a = Device::new(cold_table2(0.05, 60.0));
        let mut b = Device::new(cold_table2(0.05, 60.0));
        for &(_, frac, secs) in &prog {
            let sa = a.offer_load(g(frac * 100.0), 1518, secs).unwrap();
            let sb = b.offer_load(g(frac * 100.0), 1518, secs).unwrap();
            prop_assert_eq!(serde_json::to_string(&sa).unwrap(), serde_json::to_string(&sb).unwrap());
        }
    }

    #[test]
    fn warm_power_monotone_in_load(a in 0.0..=1.0f64, b in 0.0..=1.0f64, state in 0u32..3) {
        let d = Device::preconditioned(fixtures::three_state_router());
        let curve = &d.model().states[state as usize].curve;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(curve.power_at(lo) <= curve.power_at(hi));
    }

    #[test]
    fn warmup_converges(delta in 0.0..0.5f64, tau in 1.0..10_000.0f64, load in 0.0..=1.0f64) {
        let d = Device::new(cold_table2(delta, tau));
        let steady = d.model().states[0].curve.power_at(load);
        let p = d.instantaneous_power(load, 10.0 * tau);
        prop_assert!((steady - p) / steady < 5e-5);
    }
}
