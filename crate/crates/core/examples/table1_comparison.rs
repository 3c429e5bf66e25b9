//! Four router generations compared on ECR, printed as text and CSV.

use greenbench::fixtures;
use greenbench::metrics::{MetricKind, PacketSizeWeights};
use greenbench::orchestrator::{run_peak_suite, PeakConfig};
use greenbench::report::{export_table, render_comparison, ConfigDigest, DeviceReport, ExportFormat, ReportOptions};
use greenbench::sim::Device;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut reports = Vec::new();
    for model in fixtures::table1_devices() {
        let mut device = Device::preconditioned(model.clone());
        let suite = run_peak_suite(&mut device, &PacketSizeWeights::single(1518), &PeakConfig::default())?;
        reports.push(DeviceReport::from_sets(
            model.name.clone(),
            model.label.clone(),
            &[suite.set],
            &ReportOptions::default(),
            ConfigDigest::default(),
        )?);
    }
    let table = render_comparison(&reports, MetricKind::Ecr)?;
    print!("{}", table.to_text());
    println!();
    print!("{}", String::from_utf8(export_table(&table, ExportFormat::Csv)?)?);
    Ok(())
}
