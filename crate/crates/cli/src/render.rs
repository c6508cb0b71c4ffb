//! JSON, CSV and text renderings of a report. CSV and text are both
//! derived from the JSON value, so the three never disagree.

use anyhow::Result;
use clap::ValueEnum;
use serde_json::Value;

use crate::suites::Report;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    let v = serde_json::to_value(report)?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&v)? + "\n",
        Format::Csv => csv(&v),
        Format::Text => {
            let mut out = String::new();
            text(&v, 0, &mut out);
            out
        }
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(v: &Value, path: &str, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(x, &join(k), out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, x)| flatten(x, &join(&i.to_string()), out)),
        leaf => out.push((path.to_string(), scalar(leaf))),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One `path,value` row per JSON leaf.
fn csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(v, "", &mut rows);
    let mut out = String::from("path,value\n");
    for (p, x) in rows {
        out.push_str(&quote(&p));
        out.push(',');
        out.push_str(&quote(&x));
        out.push('\n');
    }
    out
}

fn text(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_empty(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text(x, depth + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", short(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_empty(x) => {
                        out.push_str(&format!("{pad}-\n"));
                        text(x, depth + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", short(x))),
                }
            }
        }
        leaf => out.push_str(&format!("{pad}{}\n", scalar(leaf))),
    }
}

fn is_empty(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.is_empty(),
        Value::Array(a) => a.is_empty(),
        _ => false,
    }
}

fn short(v: &Value) -> String {
    match v {
        Value::Object(_) => "{}".into(),
        Value::Array(_) => "[]".into(),
        other => scalar(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_leaves() {
        let v = json!({"a": {"b": [1, "x,y"]}, "c": null});
        assert_eq!(csv(&v), "path,value\na.b.0,1\na.b.1,\"x,y\"\nc,\n");
    }

    #[test]
    fn text_nests() {
        let mut out = String::new();
        text(&json!({"a": {"b": 1}, "l": [], "m": [2]}), 0, &mut out);
        assert_eq!(out, "a:\n  b: 1\nl: []\nm:\n  - 2\n");
    }
}
