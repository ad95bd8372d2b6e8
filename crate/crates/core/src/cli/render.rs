//! Text, CSV and JSON-lines rendering of serializable results.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::provenance::Provenance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key=value` lines for single results, CSV for tables.
    Text,
    Csv,
    /// JSON lines: a `{"meta": ...}` line, then one object per result.
    Json,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

fn comments<W: Write>(out: &mut W, prov: &Provenance) -> Result<()> {
    for c in prov.comments() {
        writeln!(out, "# {c}")?;
    }
    Ok(())
}

/// Rows of flat objects as CSV with provenance comments; columns follow the
/// field order of the first row.
pub fn table_csv<W: Write, T: Serialize>(mut out: W, prov: &Provenance, rows: &[T]) -> Result<()> {
    comments(&mut out, prov)?;
    let values: Vec<Value> = rows.iter().map(serde_json::to_value).collect::<std::result::Result<_, _>>()?;
    let mut w = csv::Writer::from_writer(out);
    if let Some(Value::Object(first)) = values.first() {
        w.write_record(first.keys())?;
        for v in &values {
            if let Value::Object(m) = v {
                w.write_record(first.keys().map(|k| m.get(k).map(cell).unwrap_or_default()))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn table_jsonl<W: Write, T: Serialize>(mut out: W, prov: &Provenance, rows: &[T]) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(&prov.to_json())?)?;
    for r in rows {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

/// One result: `key=value` lines (text), a one-row table (csv) or two JSON
/// lines.
pub fn record<W: Write, T: Serialize>(mut out: W, prov: &Provenance, format: Format, r: &T) -> Result<()> {
    match format {
        Format::Text => {
            comments(&mut out, prov)?;
            match serde_json::to_value(r)? {
                Value::Object(m) => {
                    for (k, v) in &m {
                        writeln!(out, "{k}={}", cell(v))?;
                    }
                }
                v => writeln!(out, "{}", cell(&v))?,
            }
            Ok(())
        }
        Format::Csv => table_csv(out, prov, std::slice::from_ref(r)),
        Format::Json => table_jsonl(out, prov, std::slice::from_ref(r)),
    }
}

/// Several results: CSV for text and csv, JSON lines for json.
pub fn table<W: Write, T: Serialize>(out: W, prov: &Provenance, format: Format, rows: &[T]) -> Result<()> {
    match format {
        Format::Text | Format::Csv => table_csv(out, prov, rows),
        Format::Json => table_jsonl(out, prov, rows),
    }
}
