//! Consolidated rule-count table over several runs, built from the files
//! each run left in its output directory.

use std::fmt::Write as _;
use std::path::Path;

use ocsvm_rules::ocsvm::Label;
use serde::{Deserialize, Serialize};

use crate::artifacts::{self, Timings};
use crate::config::RunConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub ok: bool,
    /// Why the row is incomplete, when it is.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
    pub proposal_na: Option<usize>,
    pub proposal_a: Option<usize>,
    pub dt_na: Option<usize>,
    pub dt_a: Option<usize>,
    pub discarded_clusters: Option<usize>,
    pub coverage_percent: Option<f64>,
    pub anomaly_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub rows: Vec<ReportRow>,
}

/// Reads one run's output directory. Missing or unreadable files mark the
/// row as failed without affecting the other rows.
pub fn collect_row(dataset: &str, dir: &Path) -> ReportRow {
    let mut row = ReportRow {
        dataset: dataset.to_string(),
        ok: true,
        problems: Vec::new(),
        proposal_na: None,
        proposal_a: None,
        dt_na: None,
        dt_a: None,
        discarded_clusters: None,
        coverage_percent: None,
        anomaly_fraction: None,
        timings: None,
    };
    let fail = |row: &mut ReportRow, name: &str, e: crate::error::CliError| {
        row.ok = false;
        row.problems.push(format!("{name}: {e}"));
    };

    for label in [Label::NonAnomalous, Label::Anomalous] {
        let name = artifacts::rules_file(label, false, "json");
        match artifacts::read_rules(&dir.join(&name)) {
            Ok(r) => {
                let n = r.rule_set.len();
                let s = r.summary;
                match label {
                    Label::NonAnomalous => {
                        row.proposal_na = Some(n);
                        row.discarded_clusters = Some(r.rule_set.discarded_clusters.len());
                        row.coverage_percent = Some(s.coverage_percent());
                        row.anomaly_fraction = Some(s.other_rows as f64 / (s.target_rows + s.other_rows) as f64);
                    }
                    Label::Anomalous => {
                        row.proposal_a = Some(n);
                        if row.anomaly_fraction.is_none() {
                            row.anomaly_fraction =
                                Some(s.target_rows as f64 / (s.target_rows + s.other_rows) as f64);
                        }
                    }
                }
            }
            Err(e) => fail(&mut row, &name, e),
        }
    }
    match artifacts::read_tree(&dir.join(artifacts::TREE_FILE)) {
        Ok(t) => {
            row.dt_na = Some(t.rule_counts.na);
            row.dt_a = Some(t.rule_counts.a);
        }
        Err(e) => fail(&mut row, artifacts::TREE_FILE, e),
    }
    let timings = dir.join(artifacts::TIMINGS_FILE);
    if timings.exists() {
        row.timings = artifacts::read_json(&timings).ok();
    }
    row
}

pub fn build_report(configs: &[RunConfig]) -> Report {
    Report {
        format_version: artifacts::FORMAT_VERSION,
        rows: configs.iter().map(|c| collect_row(c.name(), &c.output_path())).collect(),
    }
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl Report {
    /// Fixed-width table in the layout of a rule-count comparison:
    /// proposal vs. surrogate tree, non-anomalous vs. anomalous.
    pub fn to_text(&self) -> String {
        let header = [
            "Dataset", "Prop. NA", "Prop. A", "DT NA", "DT A", "Discarded", "Coverage %", "Anomalies %", "Status",
        ];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            rows.push(vec![
                r.dataset.clone(),
                cell(r.proposal_na),
                cell(r.proposal_a),
                cell(r.dt_na),
                cell(r.dt_a),
                cell(r.discarded_clusters),
                cell(r.coverage_percent.map(|c| format!("{c:.2}"))),
                cell(r.anomaly_fraction.map(|f| format!("{:.2}", 100.0 * f))),
                if r.ok { "ok".into() } else { "FAILED".into() },
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, r) in rows.iter().enumerate() {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(j, (c, &w))| if j == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                let _ = writeln!(out, "{}", rule.join("-+-"));
            }
        }
        for r in self.rows.iter().filter(|r| !r.ok) {
            for p in &r.problems {
                let _ = writeln!(out, "{}: {p}", r.dataset);
            }
        }
        out
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        artifacts::write_json(out, artifacts::REPORT_FILE, self)?;
        artifacts::write_text(out, artifacts::REPORT_TEXT_FILE, &self.to_text())?;
        Ok(())
    }
}
