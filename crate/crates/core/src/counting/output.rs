//! Row format shared by single counts and scan tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{CountResult, Method};
use crate::error::Result;
use crate::rational::Delta;

pub const CSV_HEADER: [&str; 9] = [
    "curve_id",
    "Q",
    "delta",
    "N",
    "main_term",
    "residual",
    "ambiguous",
    "method",
    "elapsed_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub curve_id: String,
    #[serde(rename = "Q")]
    pub q: u64,
    pub delta: Delta,
    #[serde(rename = "N")]
    pub n: u64,
    pub main_term: f64,
    pub residual: f64,
    pub ambiguous: u64,
    pub method: Method,
    pub elapsed_ms: f64,
}

impl From<&CountResult> for CountRow {
    fn from(r: &CountResult) -> Self {
        CountRow {
            curve_id: r.curve_id.clone(),
            q: r.query.q_max,
            delta: r.query.delta,
            n: r.n,
            main_term: r.main_term,
            residual: r.residual,
            ambiguous: r.ambiguous,
            method: r.method,
            elapsed_ms: r.elapsed_ms,
        }
    }
}

/// CSV with `# `-prefixed comment lines before the header.
pub fn write_csv<W: Write>(mut out: W, comments: &[String], rows: &[CountRow]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON lines; `meta`, if given, is written as the first line.
pub fn write_jsonl<W: Write>(
    mut out: W,
    meta: Option<&serde_json::Value>,
    rows: &[CountRow],
) -> Result<()> {
    if let Some(m) = meta {
        serde_json::to_writer(&mut out, m)?;
        writeln!(out)?;
    }
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Reads rows written by [`write_csv`], skipping comment lines.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<CountRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
