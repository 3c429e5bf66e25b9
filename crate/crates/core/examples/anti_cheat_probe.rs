//! A device that drops into a low-power state on a fixed timetable passes an
//! unprobed variable-load test and fails a probed one.

use greenbench::fixtures;
use greenbench::metrics::{Throughput, WeightProfile};
use greenbench::orchestrator::{run_variable_load_test, ProbeConfig, VlTestPlan};
use greenbench::sim::Device;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut plan = VlTestPlan::new(WeightProfile::new(0.35, 0.4, 0.25, 0.3)?, 1518, 60.0);
    plan.warmup_required = false;
    let ndr = Throughput::gbps(100.0);

    let mut unprobed = plan.clone();
    unprobed.probe = ProbeConfig::disabled();
    let set = run_variable_load_test(&mut Device::new(fixtures::cheater_downshift()), ndr, &unprobed, 7)?;
    println!("without probes: valid={} EER-VL={:.5}", set.valid, set.eer_vl(None)?.value);

    for seed in [7, 8, 9] {
        let set = run_variable_load_test(&mut Device::new(fixtures::cheater_downshift()), ndr, &plan, seed)?;
        let failing = set.probes.iter().find(|p| !p.passed);
        match failing {
            Some(p) => println!(
                "seed {seed}: {} (probe at {:.1} s delivered {:.1} of {:.1} Gbps)",
                set.invalidation_reason.as_deref().unwrap_or(""),
                p.start_s,
                p.delivered.value(),
                p.required.value()
            ),
            None => println!("seed {seed}: valid"),
        }
    }
    Ok(())
}
