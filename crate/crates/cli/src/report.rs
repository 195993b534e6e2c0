//! Report envelope and CSV emission.
//!
//! Everything except the `timestamp` field is a function of the config and
//! the seed, so two runs compare byte for byte once that field is dropped.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::args::Command;
use crate::Failure;

pub type Row = Map<String, Value>;

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    /// sha256 of the task file's bytes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task_sha256: Option<String>,
    pub seed: u64,
    /// `None` for operations that do not run trials.
    pub trials: Option<usize>,
}

impl ExperimentConfig {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ContractViolation,
    InternalFailure,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub operation: String,
    pub status: Status,
    pub trials: usize,
    pub rows: Vec<Row>,
    /// Success fraction and column means, recomputable from `rows`.
    pub aggregate: Row,
    /// Exact values of the task that trials are scored against.
    pub exact: Row,
    pub details: Vec<Value>,
}

impl TrialReport {
    pub fn new(operation: &str, rows: Vec<Row>, exact: Row, details: Vec<Value>, means: &[&str]) -> Self {
        let mut aggregate = Row::new();
        let n = rows.len().max(1) as f64;
        if rows.iter().all(|r| r.get("success").is_some_and(Value::is_boolean)) {
            let hits = rows.iter().filter(|r| r["success"] == Value::Bool(true)).count();
            aggregate.insert("success_fraction".into(), Value::from(hits as f64 / n));
        }
        for col in means {
            let sum: f64 = rows.iter().filter_map(|r| r.get(*col).and_then(Value::as_f64)).sum();
            aggregate.insert(format!("mean_{col}"), Value::from(sum / n));
        }
        TrialReport {
            operation: operation.into(),
            status: Status::Ok,
            trials: rows.len(),
            rows,
            aggregate,
            exact,
            details,
        }
    }
}

#[derive(Serialize)]
struct Timing {
    started: String,
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    config: &'a ExperimentConfig,
    report: &'a TrialReport,
    timestamp: Timing,
}

pub fn envelope_json(
    config: &ExperimentConfig,
    report: &TrialReport,
    started: chrono::DateTime<chrono::Utc>,
    elapsed_ms: u128,
) -> String {
    let env = Envelope {
        tool: "robcert",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config.hash(),
        config,
        report,
        timestamp: Timing { started: started.to_rfc3339(), elapsed_ms },
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
    s.push('\n');
    s
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Rows as CSV; the header is the key set of the first row.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        let header: Vec<&String> = first.keys().collect();
        w.write_record(&header).map_err(|e| Failure::Config(e.to_string()))?;
        for r in rows {
            w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))
                .map_err(|e| Failure::Config(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(())
}

/// Rows of a JSON report produced by another subcommand.
pub fn rows_of(report: &Value) -> Result<Vec<Row>, Failure> {
    let rows = report
        .pointer("/report/rows")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::Config("input is not a robcert report".into()))?;
    rows.iter()
        .map(|r| r.as_object().cloned().ok_or_else(|| Failure::Config("report row is not an object".into())))
        .collect()
}
