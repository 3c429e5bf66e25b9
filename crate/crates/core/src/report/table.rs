use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{format_significant, DeviceReport, ReportError};
use crate::metrics::{MetricKind, RankDirection, Units};

const ABSENT: &str = "n/a";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub device: String,
    #[serde(default)]
    pub label: Option<String>,
    /// `None` when the device has no value for this metric.
    pub value: Option<f64>,
    #[serde(default)]
    pub note: Option<String>,
}

/// One metric across devices, rows in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub metric: MetricKind,
    pub units: Units,
    pub direction: RankDirection,
    pub rows: Vec<ComparisonRow>,
    /// Row index of the class leader.
    pub leader: Option<usize>,
}

/// Renders one metric for each report. Devices without the metric keep their
/// row with an absent value and a note explaining why.
pub fn render_comparison(reports: &[DeviceReport], metric: MetricKind) -> Result<ComparisonTable, ReportError> {
    let rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|r| {
            let value = r.metric(metric).map(|m| m.value);
            let note = if value.is_some() {
                None
            } else {
                let invalid: Vec<String> = r
                    .invalid_entries()
                    .map(|v| format!("{} invalid: {}", v.procedure, v.reason.as_deref().unwrap_or("unspecified")))
                    .collect();
                Some(if invalid.is_empty() { "not measured".to_string() } else { invalid.join("; ") })
            };
            ComparisonRow { device: r.device.clone(), label: r.label.clone(), value, note }
        })
        .collect();
    if rows.iter().all(|r| r.value.is_none()) {
        return Err(ReportError::MetricAbsentEverywhere(metric));
    }
    let direction = metric.direction();
    let leader = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.value.map(|v| (i, v)))
        .reduce(|best, cur| {
            let better = match direction {
                RankDirection::LowerIsBetter => cur.1 < best.1,
                RankDirection::HigherIsBetter => cur.1 > best.1,
            };
            if better {
                cur
            } else {
                best
            }
        })
        .map(|(i, _)| i);
    Ok(ComparisonTable { metric, units: metric.units(), direction, rows, leader })
}

impl ComparisonTable {
    pub fn value_header(&self) -> String {
        format!("{} ({})", self.metric, self.units)
    }

    pub fn has_labels(&self) -> bool {
        self.rows.iter().any(|r| r.label.is_some())
    }

    /// Fixed-width text with four significant digits; `*` marks the leader.
    pub fn to_text(&self) -> String {
        let labels = self.has_labels();
        let mut header = vec!["device".to_string()];
        if labels {
            header.push("label".to_string());
        }
        header.push(self.value_header());
        header.push("note".to_string());

        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut cells = vec![r.device.clone()];
                if labels {
                    cells.push(r.label.clone().unwrap_or_default());
                }
                let mut value = r.value.map(|v| format_significant(v, 4)).unwrap_or_else(|| ABSENT.to_string());
                if self.leader == Some(i) {
                    value.push_str(" *");
                }
                cells.push(value);
                cells.push(r.note.clone().unwrap_or_default());
                cells
            })
            .collect();

        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &body {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&header).chain(body.iter()) {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        let leader_note = match self.direction {
            RankDirection::LowerIsBetter => "* class leader (lower is better)",
            RankDirection::HigherIsBetter => "* class leader (higher is better)",
        };
        let _ = writeln!(out, "{leader_note}");
        out
    }
}
