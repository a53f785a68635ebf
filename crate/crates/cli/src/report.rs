//! Machine-readable reports.
//!
//! A report is one JSON object; the CSV rendering is the same object
//! flattened to `path,value` rows, so both carry identical numbers.

use kclab::rational::{to_decimal, to_exact};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Number, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Exact value plus a 12-significant-digit decimal.
pub fn rat(q: &BigRational) -> Value {
    let approx = to_decimal(q)
        .parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null);
    json!({ "exact": to_exact(q), "approx": approx })
}

/// Integers that fit in `u64` stay numbers; larger ones become strings.
pub fn big(v: &BigUint) -> Value {
    match u64::try_from(v) {
        Ok(x) => Value::from(x),
        Err(_) => Value::String(v.to_string()),
    }
}

/// One inequality or identity tallied over a run.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub cases: u64,
    pub failures: u64,
    pub holds: bool,
}

#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    pub config: Map<String, Value>,
    pub items: Vec<Value>,
    pub aggregates: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        let config = match config {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            command: command.to_string(),
            config,
            ..Self::default()
        }
    }

    pub fn aggregate(&mut self, key: &str, v: impl Into<Value>) {
        self.aggregates.insert(key.to_string(), v.into());
    }

    /// Records a check; `failures` counts the cases where it did not hold.
    pub fn check(&mut self, name: &str, anchor: &str, cases: u64, failures: u64) {
        self.checks.push(Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            cases,
            failures,
            holds: failures == 0,
        });
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "items": self.items,
            "aggregates": self.aggregates,
            "checks": self.checks,
            "all_checks_hold": self.all_hold(),
        })
    }

    pub fn render(&self, format: Format) -> String {
        let v = self.to_json();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut rows = Vec::new();
                flatten("", &v, &mut rows);
                let mut s = String::from("path,value\n");
                for (p, x) in rows {
                    s.push_str(&csv_field(&p));
                    s.push(',');
                    s.push_str(&csv_field(&x));
                    s.push('\n');
                }
                s
            }
        }
    }
}

/// Depth-first `(path, scalar)` pairs; paths join keys and indices with `.`.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
