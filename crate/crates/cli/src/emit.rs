//! Report writers. Floats carry 17 significant digits; non-finite values are
//! written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_value::Value;

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Scalar as it appears in a flat table, or `None` for containers.
fn scalar(v: &Value) -> Option<String> {
    Some(match v {
        Value::Bool(b) => b.to_string(),
        Value::U8(x) => x.to_string(),
        Value::U16(x) => x.to_string(),
        Value::U32(x) => x.to_string(),
        Value::U64(x) => x.to_string(),
        Value::I8(x) => x.to_string(),
        Value::I16(x) => x.to_string(),
        Value::I32(x) => x.to_string(),
        Value::I64(x) => x.to_string(),
        Value::F32(x) => format_f64(f64::from(*x)),
        Value::F64(x) => format_f64(*x),
        Value::Char(c) => c.to_string(),
        Value::String(s) => s.clone(),
        Value::Unit | Value::Option(None) => String::new(),
        Value::Option(Some(inner)) | Value::Newtype(inner) => return scalar(inner),
        Value::Seq(_) | Value::Map(_) | Value::Bytes(_) => return None,
    })
}

fn key_text(k: &Value) -> String {
    scalar(k).unwrap_or_else(|| format!("{k:?}"))
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn write_json(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Option(Some(inner)) | Value::Newtype(inner) => write_json(inner, depth, out),
        Value::Unit | Value::Option(None) => out.push_str("null"),
        Value::String(s) => out.push_str(&quote(s)),
        Value::Char(c) => out.push_str(&quote(&c.to_string())),
        Value::F32(_) | Value::F64(_) => {
            let s = scalar(v).unwrap();
            if s.parse::<f64>().is_ok_and(f64::is_finite) {
                out.push_str(&s);
            } else {
                out.push_str(&quote(&s));
            }
        }
        Value::Seq(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}]", pad(depth));
        }
        Value::Bytes(b) => {
            let items: Vec<Value> = b.iter().map(|&x| Value::U8(x)).collect();
            write_json(&Value::Seq(items), depth, out);
        }
        Value::Map(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, val)) in m.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(depth + 1), quote(&key_text(k)));
                write_json(val, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{}}}", pad(depth));
        }
        other => out.push_str(&scalar(other).unwrap()),
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_value::to_value(x).map_err(|e| anyhow::anyhow!("cannot serialize report: {e}"))
}

pub fn json_text(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out.push('\n');
    out
}

fn flatten(v: &Value, path: &str, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Option(Some(inner)) | Value::Newtype(inner) => flatten(inner, path, rows),
        Value::Seq(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(item, &join(&i.to_string()), rows);
            }
        }
        Value::Map(m) => {
            for (k, val) in m {
                flatten(val, &join(&key_text(k)), rows);
            }
        }
        other => rows.push((path.to_string(), scalar(other).unwrap_or_default())),
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}

/// `path,value` rows for every leaf.
pub fn flat_csv(v: &Value) -> Result<String> {
    let mut rows = Vec::new();
    flatten(v, "", &mut rows);
    let rows: Vec<Vec<String>> = rows.into_iter().map(|(p, x)| vec![p, x]).collect();
    csv_text(&["path".into(), "value".into()], &rows)
}

/// A sequence of flat records as one table, columns in first-seen order.
pub fn table_csv(rows: &[Value]) -> Result<Option<String>> {
    let mut header: Vec<String> = Vec::new();
    let mut flat = Vec::new();
    for r in rows {
        let mut cells = Vec::new();
        flatten(r, "", &mut cells);
        for (k, _) in &cells {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
        flat.push(cells);
    }
    if header.is_empty() {
        return Ok(None);
    }
    let body: Vec<Vec<String>> = flat
        .iter()
        .map(|cells| {
            header
                .iter()
                .map(|h| cells.iter().find(|(k, _)| k == h).map(|c| c.1.clone()).unwrap_or_default())
                .collect()
        })
        .collect();
    Ok(Some(csv_text(&header, &body)?))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes `<stem>.json`, `<stem>.csv` and, when the result has a `table`
/// list, `<stem>.table.csv`. Returns the paths written.
pub fn write_report(dir: &Path, stem: &str, report: &Value) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut written = Vec::new();
    let json = dir.join(format!("{stem}.json"));
    write_file(&json, &json_text(report))?;
    written.push(json);
    let csv = dir.join(format!("{stem}.csv"));
    write_file(&csv, &flat_csv(report)?)?;
    written.push(csv);
    if let Some(Value::Seq(rows)) = find_table(report) {
        if let Some(text) = table_csv(rows)? {
            let p = dir.join(format!("{stem}.table.csv"));
            write_file(&p, &text)?;
            written.push(p);
        }
    }
    Ok(written)
}

fn find_table(report: &Value) -> Option<&Value> {
    let Value::Map(top) = report else { return None };
    let Some(Value::Map(result)) = top.get(&Value::String("result".into())) else {
        return None;
    };
    result.get(&Value::String("table".into()))
}
