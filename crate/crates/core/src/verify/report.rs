//! Reports: one record per experiment, each holding a list of checks.

use serde::{Deserialize, Serialize};
use std::path::Path;

use super::config::{Tag, Tolerance};
use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;

/// Reference value and where it comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub value: f64,
    /// Zero for closed forms; the standard error when the reference is itself an estimate.
    pub stderr: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observed {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub expected: Expected,
    pub observed: Observed,
    /// Largest accepted `|observed - expected|`.
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    /// Applies `tol` to the combined standard error of both sides.
    pub fn new(label: impl Into<String>, expected: Expected, observed: Observed, tol: &Tolerance) -> Self {
        let bound = tol.bound(expected.value, expected.stderr.hypot(observed.stderr));
        let diff = (observed.mean - expected.value).abs();
        Self { label: label.into(), pass: diff <= bound, expected, observed, bound }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inadmissible,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub tag: Tag,
    pub seed: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub checks: Vec<Check>,
    pub runtime_s: f64,
}

impl Record {
    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn from_outcome(name: &str, tag: Tag, seed: u64, outcome: Result<Vec<Check>>, runtime_s: f64) -> Self {
        let (status, message, checks) = match outcome {
            Ok(checks) if checks.iter().all(|c| c.pass) => (Status::Pass, None, checks),
            Ok(checks) => (Status::Fail, None, checks),
            Err(e @ Error::InadmissibleParameters(_)) => (Status::Inadmissible, Some(e.to_string()), Vec::new()),
            Err(e) => (Status::Error, Some(e.to_string()), Vec::new()),
        };
        Self { name: name.to_string(), tag, seed, status, message, checks, runtime_s }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub seed: u64,
    pub pass: bool,
    pub passed: usize,
    pub failed: usize,
    pub experiments: Vec<Record>,
}

impl Report {
    pub fn new(seed: u64, experiments: Vec<Record>) -> Self {
        let passed = experiments.iter().filter(|r| r.pass()).count();
        let failed = experiments.len() - passed;
        Self { schema: SCHEMA, seed, pass: failed == 0, passed, failed, experiments }
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.experiments.iter().find(|r| r.name == name)
    }

    /// The report with every runtime set to zero, for byte comparisons.
    pub fn without_runtime(&self) -> Report {
        let mut r = self.clone();
        r.experiments.iter_mut().for_each(|e| e.runtime_s = 0.0);
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV per experiment in `dir`, one row per check.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        for rec in &self.experiments {
            let path = dir.join(format!("{}.csv", sanitize(&rec.name)));
            let mut w = csv::Writer::from_path(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let csv_err = |e: csv::Error| Error::Config(format!("{}: {e}", path.display()));
            w.write_record(["label", "expected", "expected_stderr", "observed", "observed_stderr", "bound", "pass"])
                .map_err(csv_err)?;
            for c in &rec.checks {
                w.write_record([
                    c.label.clone(),
                    c.expected.value.to_string(),
                    c.expected.stderr.to_string(),
                    c.observed.mean.to_string(),
                    c.observed.stderr.to_string(),
                    c.bound.to_string(),
                    c.pass.to_string(),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        Ok(())
    }
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}
