//! Report shapes and output formatting.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::bounds::BoundConfig;

/// Result of a scan over a prime range.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub command: &'static str,
    pub parameters: Value,
    pub range: (u64, u64),
    pub counted: u64,
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub summary: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub items: Option<Vec<Value>>,
    pub cache_limit: u64,
    pub config: BoundConfig,
}

/// Result of a one-shot computation; `body` fields sit at the top level.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub parameters: Value,
    #[serde(flatten)]
    pub body: Map<String, Value>,
    pub config: BoundConfig,
}

/// Plot-ready rows for `--csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Rounds `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every non-integer number in `v` to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("finite float");
            Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn render(v: &impl Serialize) -> String {
    let value = serde_json::to_value(v).expect("reports serialize");
    serde_json::to_string_pretty(&round_floats(value)).expect("values serialize")
}

pub fn error_object(command: &str, kind: &str, message: &str, config: &BoundConfig) -> String {
    render(&serde_json::json!({
        "command": command,
        "error": { "kind": kind, "message": message },
        "config": config,
    }))
}
