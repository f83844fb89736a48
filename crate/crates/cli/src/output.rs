//! Report assembly: the JSON wrapper every command emits, and the flat CSV
//! projection of the same fields.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Format};
use crate::AppResult;

/// Wrap a command result with the resolved configuration and version, then
/// write it as JSON or CSV.
pub fn emit(cli: &Cli, command: &str, config: Value, result: impl Serialize) -> AppResult<()> {
    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": serde_json::to_value(result).expect("reports serialize"),
    });
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize"),
        Format::Csv => to_csv(&report),
    };
    match &cli.output {
        Some(path) => write_file(path, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> AppResult<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Flatten scalar leaves into dotted keys; scalar arrays join with ';',
/// nested arrays of objects are indexed.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|v| !v.is_object() && !v.is_array()) {
                let joined: Vec<String> = items.iter().map(scalar_string).collect();
                out.push((prefix.to_string(), joined.join(";")));
            } else {
                for (i, v) in items.iter().enumerate() {
                    flatten(&format!("{prefix}.{i}"), v, out);
                }
            }
        }
        other => out.push((prefix.to_string(), scalar_string(other))),
    }
}

fn scalar_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_csv(report: &Value) -> String {
    let mut fields = Vec::new();
    flatten("", report, &mut fields);
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(fields.iter().map(|(k, _)| k.as_str()))
        .expect("csv record");
    writer
        .write_record(fields.iter().map(|(_, v)| v.as_str()))
        .expect("csv record");
    let bytes = writer.into_inner().expect("csv buffer");
    String::from_utf8(bytes).expect("csv is utf-8").trim_end().to_string()
}
