//! Non-drop-rate search by bisection, checked against a brute-force sweep.

use greenbench::fixtures;
use greenbench::metrics::Throughput;
use greenbench::orchestrator::{find_ndr, NdrSearchConfig};
use greenbench::sim::Device;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::table2_router();
    for size in [64, 1518] {
        let cfg = NdrSearchConfig::for_packet_size(size);
        let mut device = Device::preconditioned(model.clone());
        let ndr = find_ndr(&mut device, &cfg)?;

        let mut sweep = Device::preconditioned(model.clone());
        let line = model.line_rate.value();
        let mut best = 0.0;
        for k in 0..=1000 {
            let rate = (line * f64::from(k) / 1000.0).min(line);
            if sweep.offer_load(Throughput::gbps(rate), size, 0.1)?.loss() == 0.0 {
                best = rate;
            }
        }
        println!(
            "{size:>5} B  bisection {:.3} Gbps  sweep {best:.3} Gbps  ({:.0} s simulated)",
            ndr.value(),
            device.now_s()
        );
    }
    Ok(())
}
