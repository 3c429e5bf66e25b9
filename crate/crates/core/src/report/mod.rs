//! Datasheet-style reports and comparison tables.
//!
//! Metric values only ever come from valid measurement sets. Invalid sets
//! show up in the validity section with their reason and nowhere else.

mod export;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use export::{
    artifact_file_name, export_report, export_table, format_significant, parse_report, parse_table, to_json_bytes,
    ExportFormat,
};
pub use table::{render_comparison, ComparisonRow, ComparisonTable};

use crate::measurement::{MeasurementSet, Procedure, SetError};
use crate::metrics::{self, AllowanceTable, MetricError, MetricKind, MetricResult, PacketSizeWeights, WeightProfile};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no report contains metric {0}")]
    MetricAbsentEverywhere(MetricKind),
    #[error("report metric {kind} comes from {procedure}, which has no valid measurement set")]
    UntracedMetric { kind: MetricKind, procedure: Procedure },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedMetric {
    pub procedure: Procedure,
    pub result: MetricResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityEntry {
    pub procedure: Procedure,
    pub valid: bool,
    #[serde(default)]
    pub reason: Option<String>,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigDigest {
    pub config_hash: String,
    pub device_seed: u64,
    pub orchestrator_seed: u64,
    #[serde(default)]
    pub weights: Option<WeightProfile>,
    #[serde(default)]
    pub packet_sizes: Vec<u32>,
}

/// Interface allowance check attached to a peak run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllowanceSpec {
    pub table: AllowanceTable,
    pub interface_counts: BTreeMap<String, u32>,
}

/// Optional extra views computed from a peak run.
#[derive(Debug, Clone, Default)]
pub struct ReportOptions<'a> {
    pub packet_weights: Option<&'a PacketSizeWeights>,
    pub allowance: Option<&'a AllowanceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDeviceReport")]
pub struct DeviceReport {
    pub device: String,
    #[serde(default)]
    pub label: Option<String>,
    pub metrics: Vec<ReportedMetric>,
    pub validity: Vec<ValidityEntry>,
    pub config: ConfigDigest,
}

#[derive(Deserialize)]
struct RawDeviceReport {
    device: String,
    #[serde(default)]
    label: Option<String>,
    metrics: Vec<ReportedMetric>,
    validity: Vec<ValidityEntry>,
    config: ConfigDigest,
}

impl TryFrom<RawDeviceReport> for DeviceReport {
    type Error = ReportError;

    fn try_from(r: RawDeviceReport) -> Result<Self, Self::Error> {
        let report = DeviceReport {
            device: r.device,
            label: r.label,
            metrics: r.metrics,
            validity: r.validity,
            config: r.config,
        };
        report.check_traceability()?;
        Ok(report)
    }
}

impl DeviceReport {
    /// Builds a report from measurement sets, computing metrics from the valid
    /// ones only.
    pub fn from_sets(
        device: impl Into<String>,
        label: Option<String>,
        sets: &[MeasurementSet],
        options: &ReportOptions<'_>,
        config: ConfigDigest,
    ) -> Result<Self, ReportError> {
        let mut report =
            DeviceReport { device: device.into(), label, metrics: Vec::new(), validity: Vec::new(), config };
        for set in sets {
            report.validity.push(ValidityEntry {
                procedure: set.procedure,
                valid: set.valid,
                reason: set.invalidation_reason.clone(),
                tags: set.tags.clone(),
            });
            if !set.valid {
                continue;
            }
            let mut push = |result: MetricResult| {
                report.metrics.push(ReportedMetric { procedure: set.procedure, result });
            };
            match set.procedure {
                Procedure::Peak => {
                    for s in set.samples.iter().map(|p| &p.sample) {
                        let mut ecr = metrics::compute_ecr(s.power, s.delivered)?;
                        ecr.inputs.insert("packet_size_bytes".into(), f64::from(s.packet_size_bytes));
                        push(ecr);
                    }
                    if let Some(w) = options.packet_weights {
                        push(set.weighted_peak(w)?);
                    }
                    if let (Some(a), Some(first)) = (options.allowance, set.samples.first()) {
                        let verdict = metrics::allowance_budget(&a.interface_counts, &a.table, first.sample.power)?;
                        push(verdict.to_metric());
                    }
                }
                Procedure::VariableLoad => push(set.eer_vl(None)?),
                Procedure::ExtendedIdle => push(set.eer_ex(None)?),
            }
        }
        Ok(report)
    }

    /// First result of `kind`, which for per-size metrics is the primary packet size.
    pub fn metric(&self, kind: MetricKind) -> Option<&MetricResult> {
        self.metrics.iter().map(|m| &m.result).find(|r| r.kind == kind)
    }

    pub fn invalid_entries(&self) -> impl Iterator<Item = &ValidityEntry> {
        self.validity.iter().filter(|v| !v.valid)
    }

    pub fn all_valid(&self) -> bool {
        self.validity.iter().all(|v| v.valid)
    }

    fn check_traceability(&self) -> Result<(), ReportError> {
        for m in &self.metrics {
            let traced = self.validity.iter().any(|v| v.valid && v.procedure == m.procedure);
            if !traced {
                return Err(ReportError::UntracedMetric { kind: m.result.kind, procedure: m.procedure });
            }
        }
        Ok(())
    }
}
