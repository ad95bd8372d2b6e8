use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::error_bound;
use crate::counting::{count, write_csv, write_jsonl, CountQuery, CountRow, Method};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::provenance::{config_digest, Provenance};
use crate::rational::{Delta, Interval};

/// Default width grid.
pub const DEFAULT_DELTAS: [f64; 5] = [0.05, 0.1, 0.2, 0.25, 0.4];

/// A grid point whose count failed; recorded instead of aborting the scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanError {
    #[serde(rename = "Q")]
    pub q: u64,
    pub delta: Delta,
    pub message: String,
}

/// Rows ordered by `(Q, delta)` plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub provenance: Provenance,
    pub rows: Vec<CountRow>,
    pub errors: Vec<ScanError>,
}

impl ScanTable {
    pub fn new(provenance: Provenance, rows: Vec<CountRow>) -> Self {
        ScanTable {
            provenance,
            rows,
            errors: Vec::new(),
        }
    }

    fn output_rows(&self, timings: bool) -> Vec<CountRow> {
        self.rows
            .iter()
            .map(|r| CountRow {
                elapsed_ms: if timings { r.elapsed_ms } else { 0.0 },
                ..r.clone()
            })
            .collect()
    }

    /// CSV with provenance comments. Without `timings`, `elapsed_ms` is
    /// written as 0 so that reruns are byte-identical.
    pub fn write_csv<W: Write>(&self, out: W, timings: bool) -> Result<()> {
        write_csv(out, &self.provenance.comments(), &self.output_rows(timings))
    }

    /// JSON lines with a leading `{"meta": ...}` line.
    pub fn write_jsonl<W: Write>(&self, out: W, timings: bool) -> Result<()> {
        write_jsonl(out, Some(&self.provenance.to_json()), &self.output_rows(timings))
    }

    /// Per-row flag for `delta > Q^(-1/(d-1) + eps)`.
    pub fn regime_flags(&self, d: u32, eps: f64) -> Vec<bool> {
        self.rows
            .iter()
            .map(|r| super::in_regime(d, r.q as f64, r.delta.as_f64(), eps))
            .collect()
    }
}

/// Counts every `(Q, delta)` of the grid in `(Q, delta)` order. Duplicate
/// grid values are dropped; failing points go to `errors`.
pub fn scan_grid(
    curve: &Curve,
    interval: &Interval,
    qs: &[u64],
    deltas: &[Delta],
    method: Method,
) -> Result<ScanTable> {
    let mut qs = qs.to_vec();
    qs.sort_unstable();
    qs.dedup();
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
    ds.dedup_by(|a, b| a.as_f64() == b.as_f64());
    if qs.is_empty() || ds.is_empty() {
        return Err(Error::InvalidArgument("scan grid is empty".into()));
    }
    for d in &ds {
        d.validate()?;
    }
    let spec = format!("{}; interval:{}", curve.kind_text(), interval);
    let mut params = BTreeMap::new();
    params.insert("curve".to_string(), spec.clone());
    params.insert("method".to_string(), method.to_string());
    params.insert("Q".to_string(), join(&qs));
    params.insert("delta".to_string(), join(&ds));
    let mut table = ScanTable::new(Provenance::new(spec, config_digest(&params)), Vec::new());
    for &q in &qs {
        for &d in &ds {
            let result = CountQuery::new(q, d, *interval).and_then(|query| count(curve, &query, method));
            match result {
                Ok(r) => table.rows.push(CountRow::from(&r)),
                Err(e) => table.errors.push(ScanError {
                    q,
                    delta: d,
                    message: e.to_string(),
                }),
            }
        }
    }
    Ok(table)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Constants `C = |N - main| / error_bound(d, Q, delta, eps)` per row and
/// their spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub constants: Vec<f64>,
    pub median: f64,
    pub max: f64,
    /// `max <= 2 median`
    pub stable: bool,
}

pub fn envelope_constants(rows: &[CountRow], d: u32, eps: f64) -> Result<EnvelopeReport> {
    if rows.is_empty() {
        return Err(Error::InsufficientRows { needed: 1, found: 0 });
    }
    let constants: Vec<f64> = rows
        .iter()
        .map(|r| r.residual.abs() / error_bound(d, r.q as f64, r.delta.as_f64(), eps))
        .collect();
    let mut sorted = constants.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let max = sorted[n - 1];
    Ok(EnvelopeReport {
        constants,
        median,
        max,
        stable: max <= 2.0 * median,
    })
}
