//! Skipping warm-up on a cold device under-reads peak power.

use greenbench::fixtures;
use greenbench::metrics::Throughput;
use greenbench::orchestrator::{measure_peak_energy, warmup_until_stable, WarmupConfig};
use greenbench::sim::{Device, WarmupModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut model = fixtures::table2_router();
    model.warmup = Some(WarmupModel { delta: 0.05, tau_s: 600.0 });
    let ndr = Throughput::gbps(100.0);

    let mut cold = Device::new(model.clone());
    let skipped = measure_peak_energy(&mut cold, ndr, 1518, 1.0)?;

    let mut warm = Device::new(model);
    let cfg = WarmupConfig { reading_interval_s: 60.0, ..WarmupConfig::default() };
    let report = warmup_until_stable(&mut warm, &cfg)?;
    let proper = measure_peak_energy(&mut warm, ndr, 1518, 1.0)?;

    println!("cold start: {:.2} W", skipped.value());
    println!("after {:.0} s warm-up ({} readings): {:.2} W", report.elapsed_s, report.readings, proper.value());
    println!("under-read by {:.2}%", 100.0 * (proper.value() - skipped.value()) / proper.value());
    Ok(())
}
