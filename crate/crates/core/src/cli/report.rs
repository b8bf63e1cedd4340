//! CSV and JSON report encoding.
//!
//! Floats are written with 17 significant digits so every value re-parses to
//! the same double.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::sampler::EstimatorReport;

pub const REPORT_HEADER: [&str; 13] = [
    "scenario",
    "dim",
    "beta",
    "exp_avg_mi",
    "support_defect",
    "avg_mi",
    "jarzynski_lhs",
    "jarzynski_rhs",
    "jarzynski_defect",
    "unitality_residual",
    "colsum_max_dev",
    "factorization_residual",
    "mi_vs_dissipation_gap",
];

pub const ESTIMATOR_HEADER: [&str; 5] = ["sample_count", "mean", "std_error", "exact_value", "z_score"];

/// One scenario's summary line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub dim: usize,
    pub beta: f64,
    pub exp_avg_mi: f64,
    pub support_defect: f64,
    pub avg_mi: f64,
    pub jarzynski_lhs: f64,
    pub jarzynski_rhs: f64,
    pub jarzynski_defect: f64,
    pub unitality_residual: f64,
    pub colsum_max_dev: f64,
    pub factorization_residual: f64,
    pub mi_vs_dissipation_gap: f64,
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(s: &str, field: &str) -> Result<f64, String> {
    s.parse().map_err(|e| format!("{field}: cannot parse {s:?}: {e}"))
}

impl ReportRow {
    fn floats(&self) -> [f64; 11] {
        [
            self.beta,
            self.exp_avg_mi,
            self.support_defect,
            self.avg_mi,
            self.jarzynski_lhs,
            self.jarzynski_rhs,
            self.jarzynski_defect,
            self.unitality_residual,
            self.colsum_max_dev,
            self.factorization_residual,
            self.mi_vs_dissipation_gap,
        ]
    }

    pub fn to_record(&self) -> Vec<String> {
        let mut rec = vec![self.scenario.clone(), self.dim.to_string()];
        rec.extend(self.floats().iter().map(|&x| format_float(x)));
        rec
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self, String> {
        if rec.len() != REPORT_HEADER.len() {
            return Err(format!("expected {} columns, got {}", REPORT_HEADER.len(), rec.len()));
        }
        let f = |i: usize| parse_float(&rec[i], REPORT_HEADER[i]);
        Ok(Self {
            scenario: rec[0].to_string(),
            dim: rec[1].parse().map_err(|e| format!("dim: {e}"))?,
            beta: f(2)?,
            exp_avg_mi: f(3)?,
            support_defect: f(4)?,
            avg_mi: f(5)?,
            jarzynski_lhs: f(6)?,
            jarzynski_rhs: f(7)?,
            jarzynski_defect: f(8)?,
            unitality_residual: f(9)?,
            colsum_max_dev: f(10)?,
            factorization_residual: f(11)?,
            mi_vs_dissipation_gap: f(12)?,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.floats().iter().all(|x| x.is_finite())
    }
}

pub fn write_rows_csv<W: Write>(out: W, rows: &[ReportRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows_csv(text: &str) -> Result<Vec<ReportRow>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(REPORT_HEADER.iter().copied()) {
        return Err(format!("unexpected header {header:?}"));
    }
    r.records()
        .map(|rec| rec.map_err(|e| e.to_string()).and_then(|rec| ReportRow::from_record(&rec)))
        .collect()
}

fn optional(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_estimator_csv<W: Write>(out: W, report: &EstimatorReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ESTIMATOR_HEADER)?;
    w.write_record([
        report.sample_count.to_string(),
        format_float(report.mean),
        format_float(report.std_error),
        optional(report.exact_value),
        optional(report.z_score),
    ])?;
    w.flush()?;
    Ok(())
}
