//! Variable-load test and the three variable-load metrics it can feed.
//!
//! TEEER and ATIS TEER use the reduced phase as their middle point here, so
//! the ATIS figure shows how far it sits above the peak efficiency `1/ECR`.

use greenbench::fixtures;
use greenbench::measurement::PhaseLabel;
use greenbench::metrics::{Throughput, WeightProfile};
use greenbench::orchestrator::{run_variable_load_test, VlTestPlan};
use greenbench::sim::Device;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let weights = WeightProfile::new(0.25, 0.5, 0.25, 0.3)?;
    let mut device = Device::preconditioned(fixtures::table2_router());
    let set = run_variable_load_test(&mut device, Throughput::gbps(100.0), &VlTestPlan::new(weights, 1518, 60.0), 42)?;

    for label in [PhaseLabel::Full, PhaseLabel::Reduced, PhaseLabel::Idle] {
        let s = set.phase(label).expect("phase recorded");
        println!("{label:<8} {:>6.1} Gbps  {:>6.1} W", s.delivered.value(), s.power.value());
    }
    let peak = 100.0 / set.phase(PhaseLabel::Full).unwrap().power.value();
    println!("1/ECR     {peak:.5} Gbps/W");
    println!("EER-VL    {:.5} Gbps/W", set.eer_vl(None)?.value);
    println!("ATIS TEER {:.5} Gbps/W", set.teer_atis(None)?.value);
    println!("TEEER     {:.5}", set.teeer(None)?.value);
    Ok(())
}
