use std::collections::BTreeMap;

use greenbench::metrics::{
    allowance_budget, compute_ecr, compute_eer_ex, compute_eer_vl, compute_teeer, compute_teer_atis,
    weighted_peak_throughput, AllowanceTable, AvgPower, MetricError, MetricKind, MetricResult, PacketSizeWeights,
    Throughput, Units, WeightProfile,
};
use proptest::prelude::*;

fn w(v: f64) -> AvgPower {
    AvgPower::watts(v)
}

fn g(v: f64) -> Throughput {
    Throughput::gbps(v)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn ecr_examples() {
    assert_eq!(compute_ecr(w(1400.0), g(100.0)).unwrap().value, 14.0);
    assert_eq!(compute_ecr(w(0.0), g(50.0)).unwrap().value, 0.0);
    let r = compute_ecr(w(863.0), g(100.0)).unwrap();
    assert_eq!(r.value, 8.63);
    assert_eq!(r.units, Units::WattsPerGbps);
    assert!(matches!(compute_ecr(w(863.0), g(0.0)), Err(MetricError::ZeroThroughput)));
}

#[test]
fn teeer_examples() {
    let v = WeightProfile::verizon();
    let r = compute_teeer(w(768.0), w(816.0), w(863.0), g(100.0), &v).unwrap();
    assert!((r.value - -0.908_994_078_140_251_2).abs() < 1e-12);
    assert!(close(r.inputs["weighted_power_w"], 810.95, 1e-14));
    let unit = compute_teeer(w(100.0), w(100.0), w(100.0), g(100.0), &v).unwrap();
    assert_eq!(unit.value, 0.0);
    let tenth = compute_teeer(w(10.0), w(10.0), w(10.0), g(100.0), &v).unwrap();
    assert!((tenth.value - 1.0).abs() < 1e-15);
}

#[test]
fn teer_atis_examples() {
    let v = WeightProfile::verizon();
    let r = compute_teer_atis(w(768.0), w(816.0), w(863.0), g(100.0), &v).unwrap();
    assert!((r.value - 0.123_312_164_745_052_1).abs() < 1e-12);
    assert!(r.value > 100.0 / 863.0);
    let full_only = WeightProfile::new(0.0, 0.0, 1.0, 0.5).unwrap();
    let degenerate = compute_teer_atis(w(768.0), w(816.0), w(863.0), g(100.0), &full_only).unwrap();
    assert_eq!(degenerate.value, 100.0 / 863.0);
    let flat = compute_teer_atis(w(500.0), w(500.0), w(500.0), g(100.0), &v).unwrap();
    assert_eq!(flat.value, 100.0 / 500.0);
}

#[test]
fn eer_vl_examples() {
    let quarter = WeightProfile::new(0.25, 0.5, 0.25, 0.3).unwrap();
    let r = compute_eer_vl(g(100.0), g(30.0), w(863.0), w(801.0), w(768.0), &quarter).unwrap();
    assert!((r.value - 0.049_489_638_107_021_34).abs() < 1e-15);
    assert_eq!(r.units, Units::GbpsPerWatt);

    let third = WeightProfile::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5).unwrap();
    let ideal = compute_eer_vl(g(100.0), g(50.0), w(800.0), w(400.0), w(0.0), &third).unwrap();
    assert!(close(ideal.value, 0.125, 1e-12));

    let full = WeightProfile::new(1.0, 0.0, 0.0, 0.5).unwrap();
    let r = compute_eer_vl(g(100.0), g(30.0), w(863.0), w(801.0), w(768.0), &full).unwrap();
    assert_eq!(r.value, 100.0 / 863.0);

    let err = compute_eer_vl(g(30.0), g(100.0), w(863.0), w(801.0), w(768.0), &quarter);
    assert!(matches!(err, Err(MetricError::ReducedExceedsFull { .. })));
}

#[test]
fn eer_ex_examples() {
    let third = WeightProfile::new(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5).unwrap();
    let r = compute_eer_ex(g(100.0), g(50.0), g(10.0), w(863.0), w(700.0), w(500.0), &third).unwrap();
    assert!(close(r.value, 160.0 / 2063.0, 1e-12));
    let same = compute_eer_ex(g(100.0), g(100.0), g(100.0), w(863.0), w(863.0), w(863.0), &third).unwrap();
    assert!(close(same.value, 100.0 / 863.0, 1e-12));
    let full = WeightProfile::new(1.0, 0.0, 0.0, 0.5).unwrap();
    let r = compute_eer_ex(g(100.0), g(50.0), g(10.0), w(863.0), w(700.0), w(500.0), &full).unwrap();
    assert_eq!(r.value, 100.0 / 863.0);
}

#[test]
fn allowance_examples() {
    let table = AllowanceTable::new(BTreeMap::from([("WAN".into(), 10.0), ("LAN".into(), 2.0)])).unwrap();
    let counts = BTreeMap::from([("WAN".to_string(), 1), ("LAN".to_string(), 4)]);
    let ok = allowance_budget(&counts, &table, w(15.0)).unwrap();
    assert_eq!(ok.ceiling.value(), 18.0);
    assert!(ok.pass);
    assert!(!allowance_budget(&counts, &table, w(18.1)).unwrap().pass);
    let none = allowance_budget(&BTreeMap::new(), &table, w(0.0)).unwrap();
    assert_eq!(none.ceiling.value(), 0.0);
    assert!(none.pass);
    let unknown = BTreeMap::from([("DSL".to_string(), 1)]);
    assert!(matches!(allowance_budget(&unknown, &table, w(1.0)), Err(MetricError::UnknownInterfaceClass(_))));
    assert_eq!(ok.to_metric().kind, MetricKind::Allowance);
}

#[test]
fn weighted_peak_examples() {
    let ndr = BTreeMap::from([(64, g(40.0)), (1518, g(100.0))]);
    let half = PacketSizeWeights::new(vec![(64, 0.5), (1518, 0.5)]).unwrap();
    assert_eq!(weighted_peak_throughput(&ndr, &half).unwrap().value, 70.0);
    assert_eq!(weighted_peak_throughput(&ndr, &PacketSizeWeights::single(1518)).unwrap().value, 100.0);
    let missing = PacketSizeWeights::new(vec![(512, 1.0)]).unwrap();
    assert!(matches!(weighted_peak_throughput(&ndr, &missing), Err(MetricError::MissingPacketSize(512))));
}

#[test]
fn invalid_weights_rejected() {
    assert!(WeightProfile::new(0.3, 0.3, 0.3, 0.5).is_err());
    assert!(WeightProfile::new(-0.1, 0.6, 0.5, 0.5).is_err());
    assert!(WeightProfile::new(0.35, 0.4, 0.25, 1.0).is_err());
    assert!(PacketSizeWeights::new(vec![(64, 0.5), (1518, 0.4)]).is_err());
    assert!(PacketSizeWeights::new(vec![(1518, 0.5), (64, 0.5)]).is_err());
    assert!(serde_json::from_str::<WeightProfile>(
        r#"{"alpha":0.5,"beta":0.3,"epsilon":0.1,"reduced_load_fraction":0.3}"#
    )
    .is_err());
}

#[test]
fn metric_result_units_bound_to_kind() {
    let r = compute_ecr(w(863.0), g(100.0)).unwrap();
    let mut json: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(json["units"], "W/Gbps");
    json["units"] = "Gbps/W".into();
    assert!(serde_json::from_value::<MetricResult>(json).is_err());
    for kind in MetricKind::ALL {
        let parsed: MetricKind = kind.as_str().parse().unwrap();
        assert_eq!(parsed, kind);
    }
    assert_eq!("eer-vl".parse::<MetricKind>().unwrap(), MetricKind::EerVl);
}

fn weights() -> impl Strategy<Value = WeightProfile> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| {
        let beta = (1.0 - a) * b;
        WeightProfile::new(a, beta, 1.0 - a - beta, 0.3).unwrap()
    })
}

proptest! {
    #[test]
    fn ecr_round_trips(e in 0.0..1e5f64, t in 1e-3..1e5f64) {
        let r = compute_ecr(w(e), g(t)).unwrap();
        prop_assert!((r.value * t - e).abs() <= 1e-12 * e.max(1.0));
    }

    #[test]
    fn eer_vl_bounded_by_peak(
        wp in weights(),
        t_full in 0.1..5000.0f64,
        red in 0.0..=1.0f64,
        e_full in 1.0..10_000.0f64,
        slack in 1.0..3.0f64,
        e_idle in 0.0..5000.0f64,
    ) {
        let t_red = t_full * red;
        let e_red = e_full * red * slack;
        let r = compute_eer_vl(g(t_full), g(t_red), w(e_full), w(e_red), w(e_idle), &wp).unwrap();
        prop_assert!(r.value <= t_full / e_full * (1.0 + 1e-12));
    }

    #[test]
    fn atis_dominates_eer_vl(
        wp in weights(),
        t_full in 0.1..5000.0f64,
        red in 0.0..=1.0f64,
        idle in 1.0..1000.0f64,
        d1 in 0.0..1000.0f64,
        d2 in 0.0..1000.0f64,
    ) {
        let (e_idle, e_red, e_full) = (idle, idle + d1, idle + d1 + d2);
        // the two metrics name load points in opposite order; weight each load point identically
        let per_point = WeightProfile::new(wp.epsilon, wp.beta, wp.alpha, wp.reduced_load_fraction).unwrap();
        let atis = compute_teer_atis(w(e_idle), w(e_red), w(e_full), g(t_full), &per_point).unwrap();
        let vl = compute_eer_vl(g(t_full), g(t_full * red), w(e_full), w(e_red), w(e_idle), &wp).unwrap();
        prop_assert!(atis.value >= vl.value * (1.0 - 1e-12));
    }

    #[test]
    fn teeer_orders_like_weighted_power(
        wp in weights(),
        t in 1.0..1000.0f64,
        a in (1.0..1000.0f64, 0.0..500.0f64, 0.0..500.0f64),
        b in (1.0..1000.0f64, 0.0..500.0f64, 0.0..500.0f64),
    ) {
        let pts = |(i, d1, d2): (f64, f64, f64)| (i, i + d1, i + d1 + d2);
        let (ai, ah, af) = pts(a);
        let (bi, bh, bf) = pts(b);
        let ta = compute_teeer(w(ai), w(ah), w(af), g(t), &wp).unwrap();
        let tb = compute_teeer(w(bi), w(bh), w(bf), g(t), &wp).unwrap();
        let pa = ta.inputs["weighted_power_w"];
        let pb = tb.inputs["weighted_power_w"];
        if pa < pb * (1.0 - 1e-9) {
            prop_assert!(ta.value > tb.value);
        } else if pa > pb * (1.0 + 1e-9) {
            prop_assert!(ta.value < tb.value);
        }
        let faster = compute_teeer(w(ai), w(ah), w(af), g(t * 2.0), &wp).unwrap();
        prop_assert!(faster.value > ta.value);
    }

    #[test]
    fn eer_ex_collapses_to_eer_vl(
        wp in weights(),
        t_full in 0.1..5000.0f64,
        red in 0.0..=1.0f64,
        e_idle in 0.0..1000.0f64,
        d1 in 0.0..1000.0f64,
        d2 in 1.0..1000.0f64,
    ) {
        let (e_red, e_full) = (e_idle + d1, e_idle + d1 + d2);
        let vl = compute_eer_vl(g(t_full), g(t_full * red), w(e_full), w(e_red), w(e_idle), &wp).unwrap();
        let ex = compute_eer_ex(g(t_full), g(t_full * red), g(0.0), w(e_full), w(e_red), w(e_idle), &wp).unwrap();
        prop_assert!(close(ex.value, vl.value, 1e-12));
    }

    #[test]
    fn metrics_are_pure(wp in weights(), t in 1.0..1000.0f64, e in 1.0..1000.0f64) {
        let a = compute_teer_atis(w(e * 0.9), w(e * 0.95), w(e), g(t), &wp).unwrap();
        let b = compute_teer_atis(w(e * 0.9), w(e * 0.95), w(e), g(t), &wp).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
