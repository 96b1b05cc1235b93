//! Rendering of a run envelope as JSON, CSV or text.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// What every run prints: the command, its fully resolved configuration,
/// the overall verdict and the report.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub config: Value,
    pub passed: bool,
    pub report: Value,
}

impl Envelope {
    pub fn render(&self, format: Format) -> String {
        let value = serde_json::to_value(self).expect("envelope serialises");
        match format {
            Format::Json => serde_json::to_string_pretty(&value).expect("json") + "\n",
            Format::Csv => {
                let mut out = String::from("key,value\n");
                for (k, v) in flatten(&value) {
                    out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
                }
                out
            }
            Format::Text => {
                let rows = flatten(&value);
                let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
            }
        }
    }
}

/// Dotted key paths to scalar leaves; arrays of scalars stay on one line.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn walk(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| walk(&key(k), v, out)),
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            out.push((prefix.to_string(), items.iter().map(scalar).collect::<Vec<_>>().join(" ")));
        }
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| walk(&key(&i.to_string()), v, out)),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn error_envelope(command: &str, message: &str) -> Value {
    json!({ "command": command, "error": message })
}
