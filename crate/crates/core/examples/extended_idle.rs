//! Extended-idle test over three explicit power states.

use greenbench::fixtures;
use greenbench::metrics::{Throughput, WeightProfile};
use greenbench::orchestrator::{run_extended_idle_test, ExPhase, ExTestPlan};
use greenbench::sim::Device;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = ExTestPlan {
        weights: WeightProfile::new(0.3, 0.4, 0.3, 0.3)?,
        packet_size_bytes: 1518,
        state_schedule: vec![
            ExPhase { state_id: 0, phase_duration_s: 60.0, load_fraction_of_state_capacity: 1.0 },
            ExPhase { state_id: 1, phase_duration_s: 60.0, load_fraction_of_state_capacity: 0.6 },
            ExPhase { state_id: 2, phase_duration_s: 60.0, load_fraction_of_state_capacity: 0.5 },
        ],
    };
    let mut device = Device::preconditioned(fixtures::three_state_router());
    let set = run_extended_idle_test(&mut device, Throughput::gbps(100.0), &plan)?;
    for s in &set.samples {
        println!("{:<8} {:>6.1} Gbps  {:>6.1} W", s.phase, s.sample.delivered.value(), s.sample.power.value());
    }
    println!("EER-EX {:.5} Gbps/W after {:.0} s", set.eer_ex(None)?.value, device.now_s());
    Ok(())
}
