//! Machine-readable verification reports: JSON with stable field order, plus
//! a flattened CSV export.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use mahler_core::tolerance::Tolerances;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub tolerance_profile: String,
    pub tolerances: TolerancesView,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    /// The only field allowed to differ between identical runs.
    pub timestamp: String,
}

#[derive(Serialize)]
pub struct TolerancesView {
    pub tol_orth: f64,
    pub tol_geom: f64,
    pub tol_quad: f64,
    pub quad_subdivisions: u32,
    pub mc_samples: usize,
}

impl From<&Tolerances> for TolerancesView {
    fn from(t: &Tolerances) -> Self {
        TolerancesView {
            tol_orth: t.tol_orth,
            tol_geom: t.tol_geom,
            tol_quad: t.tol_quad,
            quad_subdivisions: t.quad_subdivisions,
            mc_samples: t.mc_samples,
        }
    }
}

#[derive(Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The statement this check verifies, e.g. "thm1.3" or "prop5.1".
    pub statement: String,
    pub values: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn new(command: String, seed: u64, profile: &str, tol: &Tolerances) -> Self {
        Report {
            command,
            seed,
            tolerance_profile: profile.to_string(),
            tolerances: tol.into(),
            checks: Vec::new(),
            summary: Summary {
                total: 0,
                passed: 0,
                failed: 0,
            },
            timestamp: unix_timestamp(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn finalize(&mut self) {
        self.summary.total = self.checks.len();
        self.summary.passed = self.checks.iter().filter(|c| c.pass).count();
        self.summary.failed = self.summary.total - self.summary.passed;
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .with_context(|| format!("cannot write report to {path:?}"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        writeln!(out, "name,statement,bound,margin,pass").unwrap();
        for c in &self.checks {
            writeln!(
                out,
                "{},{},{},{},{}",
                c.name,
                c.statement,
                c.bound.map(|b| b.to_string()).unwrap_or_default(),
                c.margin.map(|m| m.to_string()).unwrap_or_default(),
                c.pass
            )
            .unwrap();
        }
        std::fs::write(path, out).with_context(|| format!("cannot write CSV to {path:?}"))
    }
}

fn unix_timestamp() -> String {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default()
}

/// Helper for assembling the `values` map tersely.
pub fn values(entries: &[(&str, Value)]) -> Map<String, Value> {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert((*k).to_string(), v.clone());
    }
    m
}

pub fn num(x: f64) -> Value {
    serde_json::json!(x)
}

pub fn vector(v: &mahler_core::Vector) -> Value {
    Value::Array(v.iter().map(|&c| serde_json::json!(c)).collect())
}
