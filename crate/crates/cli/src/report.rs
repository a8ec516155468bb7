//! Report rows, checks, and the two output files.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use berry_cumulants::bargmann::CumulantSet;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::RunError;

/// CSV columns, in order.
pub const CSV_HEADER: [&str; 18] = [
    "case",
    "kind",
    "theta",
    "mu",
    "t1",
    "t2",
    "delta",
    "lattice_constant",
    "winding",
    "points",
    "cycle_length",
    "C1",
    "C2",
    "C3",
    "C4",
    "residual_vs_oracle",
    "passed",
    "route",
];

/// One CSV line. `C1..C4` are per-cycle values unless `kind` says otherwise.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Row {
    pub case: usize,
    pub kind: String,
    pub theta: Option<f64>,
    pub mu: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub delta: Option<f64>,
    pub lattice_constant: Option<f64>,
    pub winding: Option<i64>,
    pub points: usize,
    pub cycle_length: f64,
    #[serde(rename = "C1")]
    pub c1: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    #[serde(rename = "C3")]
    pub c3: Option<f64>,
    #[serde(rename = "C4")]
    pub c4: Option<f64>,
    pub residual_vs_oracle: Option<f64>,
    pub passed: Option<bool>,
    pub route: String,
}

impl Row {
    pub fn with_cumulants(mut self, c: &CumulantSet) -> Self {
        [self.c1, self.c2, self.c3, self.c4] = c.as_array();
        self.points = c.grid.points;
        self.cycle_length = c.grid.period;
        self.route = c.route.as_str().to_string();
        self
    }

    pub fn with_values(mut self, v: [Option<f64>; 4]) -> Self {
        [self.c1, self.c2, self.c3, self.c4] = v;
        self
    }

    pub fn with_residual(mut self, residual: f64, passed: bool) -> Self {
        self.residual_vs_oracle = Some(residual);
        self.passed = Some(passed);
        self
    }

    pub fn cumulants(&self) -> [Option<f64>; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub config_sha256: String,
    pub task: &'static str,
    /// Convention notes that affect how the numbers read.
    pub conventions: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub metadata: Metadata,
    pub config: RunConfig,
    pub rows: Vec<Row>,
    /// Task-specific quantities that do not fit the row schema.
    pub summary: serde_json::Value,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(config: RunConfig, rows: Vec<Row>, summary: serde_json::Value, checks: Vec<Check>) -> Self {
        let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let mut conventions = vec!["C1..C4 columns are per-cycle values; divide by cycle_length for per-unit-parameter values"];
        if config.task == crate::config::Task::Polarization {
            conventions.push("periodic Bloch convention with both orbitals at the cell origin");
        }
        Self {
            metadata: Metadata {
                tool: "berrycum",
                version: env!("CARGO_PKG_VERSION"),
                timestamp_unix,
                config_sha256: config.hash(),
                task: config.task.as_str(),
                conventions,
            },
            config,
            rows,
            summary,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>, RunError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let fail = |e: csv::Error| RunError::Output { path: "report.csv".into(), message: e.to_string() };
        w.write_record(CSV_HEADER).map_err(fail)?;
        for row in &self.rows {
            w.serialize(row).map_err(fail)?;
        }
        w.into_inner().map_err(|e| RunError::Output { path: "report.csv".into(), message: e.to_string() })
    }

    /// Writes `report.csv` and `report.json` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let io = |path: &Path, e: std::io::Error| RunError::Output { path: path.display().to_string(), message: e.to_string() };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let csv_path = dir.join("report.csv");
        std::fs::write(&csv_path, self.csv_bytes()?).map_err(|e| io(&csv_path, e))?;
        let json_path = dir.join("report.json");
        let json = serde_json::to_vec_pretty(self).map_err(|e| RunError::Output {
            path: json_path.display().to_string(),
            message: e.to_string(),
        })?;
        std::fs::write(&json_path, json).map_err(|e| io(&json_path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Task;

    #[test]
    fn header_matches_row_fields() {
        let cfg = RunConfig::from_json("{}", Task::SpinSweep).unwrap();
        let row = Row { kind: "value".into(), route: "product".into(), points: 64, ..Default::default() };
        let r = RunReport::new(cfg, vec![row], serde_json::Value::Null, vec![]);
        let text = String::from_utf8(r.csv_bytes().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap().split(',').count(), CSV_HEADER.len());
        assert!(r.passed());
    }
}
