use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{ComparisonTable, DeviceReport, ReportError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ExportFormat::Json => "json",
            ExportFormat::Csv => "csv",
        })
    }
}

/// Pretty JSON with a trailing newline, the on-disk form of every artifact.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// CSV columns: device, optional label, the metric (units in the header), note.
/// Values keep full precision; absent values are empty cells.
pub fn export_table(table: &ComparisonTable, format: ExportFormat) -> Result<Vec<u8>, ReportError> {
    match format {
        ExportFormat::Json => Ok(to_json_bytes(table)?),
        ExportFormat::Csv => {
            let labels = table.has_labels();
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["device".to_string()];
            if labels {
                header.push("label".to_string());
            }
            header.push(table.value_header());
            header.push("note".to_string());
            w.write_record(&header)?;
            for row in &table.rows {
                let mut rec = vec![row.device.clone()];
                if labels {
                    rec.push(row.label.clone().unwrap_or_default());
                }
                rec.push(row.value.map(|v| v.to_string()).unwrap_or_default());
                rec.push(row.note.clone().unwrap_or_default());
                w.write_record(&rec)?;
            }
            Ok(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
        }
    }
}

/// CSV columns: device, procedure, metric, units, value.
pub fn export_report(report: &DeviceReport, format: ExportFormat) -> Result<Vec<u8>, ReportError> {
    match format {
        ExportFormat::Json => Ok(to_json_bytes(report)?),
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["device", "procedure", "metric", "units", "value"])?;
            for m in &report.metrics {
                w.write_record([
                    report.device.as_str(),
                    m.procedure.as_str(),
                    m.result.kind.as_str(),
                    m.result.units.as_str(),
                    &m.result.value.to_string(),
                ])?;
            }
            Ok(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
        }
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<DeviceReport, ReportError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_table(bytes: &[u8]) -> Result<ComparisonTable, ReportError> {
    Ok(serde_json::from_slice(bytes)?)
}

/// `<device>_<procedure>_<confighash>.json`, with the device name reduced to
/// filename-safe characters.
pub fn artifact_file_name(device: &str, procedure: &str, config_hash: &str) -> String {
    let safe: String =
        device.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect();
    format!("{safe}_{procedure}_{config_hash}.json")
}

/// Formats `value` with `digits` significant digits, without exponent notation.
pub fn format_significant(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let decimals_for = |v: f64| {
        let magnitude = v.abs().log10().floor() as i32;
        (digits as i32 - 1 - magnitude).max(0) as usize
    };
    let decimals = decimals_for(value);
    let text = format!("{value:.decimals$}");
    // rounding may carry into a new leading digit (9.9996 -> 10.000)
    let rounded: f64 = text.parse().unwrap_or(value);
    let again = decimals_for(rounded);
    if again < decimals {
        format!("{rounded:.again$}")
    } else {
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(14.0, 4), "14.00");
        assert_eq!(format_significant(9.7, 4), "9.700");
        assert_eq!(format_significant(3.54, 4), "3.540");
        assert_eq!(format_significant(1.54, 4), "1.540");
        assert_eq!(format_significant(0.049489, 4), "0.04949");
        assert_eq!(format_significant(-0.90900, 4), "-0.9090");
        assert_eq!(format_significant(9.99996, 4), "10.00");
        assert_eq!(format_significant(123456.0, 4), "123456");
        assert_eq!(format_significant(0.0, 4), "0.000");
    }

    #[test]
    fn file_names() {
        assert_eq!(artifact_file_name("table2_router", "peak", "abc123"), "table2_router_peak_abc123.json");
        assert_eq!(artifact_file_name("PTX 5000/x", "report", "h"), "PTX_5000_x_report_h.json");
    }
}
