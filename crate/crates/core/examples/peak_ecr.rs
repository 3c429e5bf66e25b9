//! Peak energy consumption rating for the Table 2 reference router.
//!
//! Run with `cargo run --example peak_ecr`.

use greenbench::fixtures;
use greenbench::metrics::PacketSizeWeights;
use greenbench::orchestrator::{run_peak_suite, warmup_until_stable, PeakConfig, WarmupConfig};
use greenbench::sim::Device;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut device = Device::new(fixtures::table2_router());
    warmup_until_stable(&mut device, &WarmupConfig::default())?;

    let sizes = PacketSizeWeights::new(vec![(64, 0.4), (1518, 0.6)])?;
    let suite = run_peak_suite(&mut device, &sizes, &PeakConfig::default())?;
    for (size, ecr) in &suite.ecr {
        println!("{size:>5} B  NDR {:>7.3} Gbps  ECR {:.4} W/Gbps", suite.ndr[size].value(), ecr.value);
    }
    println!("weighted peak throughput {:.3} Gbps", suite.weighted.value);
    Ok(())
}
