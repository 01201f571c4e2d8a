//! Run records and their JSON rendering.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), so a record
//! round-trips every `f64` exactly and two runs can be diffed byte for byte.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use singtrace_core::io::format_real;

pub struct RunRecord {
    pub command: &'static str,
    pub parameters: Value,
    pub horizon: Option<usize>,
    pub procedure: Option<String>,
    pub result: Value,
    pub diagnostics: Vec<String>,
}

impl RunRecord {
    pub fn new(command: &'static str, parameters: Value, result: Value) -> Self {
        RunRecord {
            command,
            parameters,
            horizon: None,
            procedure: None,
            result,
            diagnostics: Vec::new(),
        }
    }

    pub fn horizon(mut self, horizon: usize) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn procedure(mut self, label: impl Into<String>) -> Self {
        self.procedure = Some(label.into());
        self
    }

    pub fn diagnostic(mut self, note: impl Into<String>) -> Self {
        self.diagnostics.push(note.into());
        self
    }

    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("command".into(), Value::from(self.command));
        map.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        map.insert("parameters".into(), self.parameters.clone());
        map.insert("horizon".into(), self.horizon.map_or(Value::Null, Value::from));
        if let Some(p) = &self.procedure {
            map.insert("procedure".into(), Value::from(p.as_str()));
        }
        map.insert("result".into(), self.result.clone());
        map.insert(
            "diagnostics".into(),
            Value::Array(self.diagnostics.iter().map(|d| Value::from(d.as_str())).collect()),
        );
        Value::Object(map)
    }
}

/// Pretty-printed JSON with fixed-precision reals.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&format_real(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short arrays of scalars stay on one line
            if items.len() <= 4 && items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, v, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, v, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(out, v, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn reals_round_trip_with_17_digits() {
        let x = 0.1f64 + 0.2;
        let text = render(&json!({ "x": x, "n": 3, "list": [1.5, -2.0] }));
        assert!(text.contains("\"x\": 3.0000000000000004e-1"));
        assert!(text.contains("\"n\": 3"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), x);
        assert_eq!(back["list"][1].as_f64().unwrap(), -2.0);
    }

    #[test]
    fn record_layout() {
        let r = RunRecord::new("norm", json!({"psi": "log"}), json!({"value": 1.0}))
            .horizon(10)
            .procedure("cesaro:1")
            .diagnostic("note");
        let v = r.to_value();
        assert_eq!(v["command"], "norm");
        assert_eq!(v["horizon"], 10);
        assert_eq!(v["procedure"], "cesaro:1");
        assert_eq!(v["diagnostics"][0], "note");
    }
}
