use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::e;
use super::kahan::ComplexSum;
use crate::curves::{Curve, ScaledAtQ, ScaledPoly, SmoothFn};
use crate::error::{Error, Result};
use crate::rational::Interval;

/// Float guard for window-edge ties.
const TIE_GUARD: f64 = 1e-12;
/// Sequence entries per chunk in the Erdős-Turán reduction.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeqEntry {
    pub a: i64,
    pub q: u64,
    /// `q f(a/q)`
    pub u: f64,
    /// `u mod 1` in `[0, 1)`, exact before rounding for polynomial curves.
    pub frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequencePoints {
    pub curve_id: String,
    pub interval: Interval,
    pub q_max: u64,
    pub entries: Vec<SeqEntry>,
}

impl SequencePoints {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds a sequence from raw values, for synthetic tests.
    pub fn from_values(values: &[f64]) -> Self {
        SequencePoints {
            curve_id: "values".into(),
            interval: Interval::from_ints(0, 0),
            q_max: 0,
            entries: values
                .iter()
                .enumerate()
                .map(|(i, &u)| SeqEntry {
                    a: i as i64,
                    q: 1,
                    u,
                    frac: u - u.floor(),
                })
                .collect(),
        }
    }
}

/// Per-`q` evaluator of `q f(a/q)` and its fractional part.
struct AtQ<'a> {
    curve: &'a Curve,
    q: f64,
    exact: Option<ScaledAtQ<i128>>,
}

impl<'a> AtQ<'a> {
    fn new(curve: &'a Curve, scaled: Option<&ScaledPoly>, q: u64) -> Self {
        AtQ {
            curve,
            q: q as f64,
            exact: scaled.and_then(|s| s.for_q::<i128>(q)),
        }
    }

    fn eval(&self, a: i64) -> (f64, f64) {
        if let Some(sq) = &self.exact {
            if let Some(n) = sq.numerator(a) {
                let d = sq.den;
                let r = n.mod_floor(&d);
                return (n as f64 / d as f64, r as f64 / d as f64);
            }
        }
        let u = self.q * self.curve.value(a as f64 / self.q);
        (u, u - u.floor())
    }
}

/// Entries `(a, q, q f(a/q))` ordered by `(q, a)` over `q <= Q`, `a/q` in `I`.
pub fn sequence_points(curve: &Curve, interval: &Interval, q_max: u64) -> Result<SequencePoints> {
    let (lo, hi) = curve.domain();
    if interval.lo_f64() < lo || interval.hi_f64() > hi {
        return Err(Error::OutsideDomain {
            x: if interval.lo_f64() < lo {
                interval.lo_f64()
            } else {
                interval.hi_f64()
            },
            lo,
            hi,
        });
    }
    let scaled = curve.polynomial_ref().map(|p| p.scaled());
    let per_q: Vec<Vec<SeqEntry>> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let at = AtQ::new(curve, scaled.as_ref(), q);
            let (s, t) = interval.numerators(q);
            (s..=t)
                .map(|a| {
                    let (u, frac) = at.eval(a);
                    SeqEntry { a, q, u, frac }
                })
                .collect()
        })
        .collect();
    Ok(SequencePoints {
        curve_id: curve.kind_text(),
        interval: *interval,
        q_max,
        entries: per_q.into_iter().flatten().collect(),
    })
}

fn check_window(alpha: f64, beta: f64) -> Result<f64> {
    let w = beta - alpha;
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window ({alpha}, {beta}) must have width in (0, 1)"
        )));
    }
    Ok(w)
}

/// Window count `Z` and discrepancy `D = Z - (beta - alpha) N`, with the
/// number of points within float guard of a window edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "Z")]
    pub z: u64,
    #[serde(rename = "D")]
    pub d: f64,
    pub ties: u64,
    pub et_bound: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<u64>,
}

/// `(Z, D)`: `Z` counts `u` with `u mod 1` strictly inside `(alpha, beta)`
/// mod 1.
pub fn discrepancy(points: &SequencePoints, alpha: f64, beta: f64) -> Result<(u64, f64)> {
    let r = window_count(points, alpha, beta)?;
    Ok((r.z, r.d))
}

fn window_count(points: &SequencePoints, alpha: f64, beta: f64) -> Result<DiscrepancyRecord> {
    let w = check_window(alpha, beta)?;
    let shift = alpha - alpha.floor();
    let (mut z, mut ties) = (0u64, 0u64);
    for p in &points.entries {
        let mut t = p.frac - shift;
        if t < 0.0 {
            t += 1.0;
        }
        z += (t > 0.0 && t < w) as u64;
        ties += (t.abs() <= TIE_GUARD || (t - w).abs() <= TIE_GUARD || (1.0 - t) <= TIE_GUARD)
            as u64;
    }
    let n = points.len();
    Ok(DiscrepancyRecord {
        n,
        alpha,
        beta,
        z,
        d: z as f64 - w * n as f64,
        ties,
        et_bound: None,
        k: None,
    })
}

/// Window count together with the Erdős-Turán bound at truncation `k`.
pub fn discrepancy_record(
    points: &SequencePoints,
    alpha: f64,
    beta: f64,
    k: u64,
) -> Result<DiscrepancyRecord> {
    let mut r = window_count(points, alpha, beta)?;
    r.et_bound = Some(erdos_turan_bound(points, alpha, beta, k)?);
    r.k = Some(k);
    Ok(r)
}

/// `b_k = 1/(K+1) + min(beta - alpha, 1/(pi k))`.
pub fn et_coefficient(k: u64, big_k: u64, width: f64) -> f64 {
    1.0 / (big_k + 1) as f64 + width.min(1.0 / (std::f64::consts::PI * k as f64))
}

/// `N/(K+1) + 2 sum_{k <= K} b_k |sum_n e(k u_n)|`, an upper bound for `|D|`.
pub fn erdos_turan_bound(points: &SequencePoints, alpha: f64, beta: f64, k: u64) -> Result<f64> {
    let w = check_window(alpha, beta)?;
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let sums = power_sums(points, k as usize);
    let n = points.len() as f64;
    let tail = super::kahan::real_sum(
        sums.iter()
            .enumerate()
            .map(|(i, s)| et_coefficient(i as u64 + 1, k, w) * s.norm()),
    );
    Ok(n / (k + 1) as f64 + 2.0 * tail)
}

/// `S_k = sum_n e(k u_n)` for `k = 1..=K` via `e(k u) = e(u)^k`, reduced
/// chunk by chunk in a fixed order.
fn power_sums(points: &SequencePoints, k: usize) -> Vec<Complex64> {
    let partial: Vec<Vec<ComplexSum>> = points
        .entries
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![ComplexSum::default(); k];
            for p in chunk {
                let z = e(p.frac);
                let mut zk = z;
                for slot in acc.iter_mut() {
                    slot.add(zk);
                    zk *= z;
                }
            }
            acc
        })
        .collect();
    (0..k)
        .map(|i| {
            partial
                .iter()
                .map(|c| c[i].value())
                .collect::<ComplexSum>()
                .value()
        })
        .collect()
}

/// `S_k = sum_{q <= Q} sum_{a/q in I} e(k q f(a/q))`, compensated and
/// reduced over `q` in order.
pub fn exp_sum(curve: &Curve, interval: &Interval, q_max: u64, k: i64) -> Result<Complex64> {
    let points = sequence_points(curve, interval, q_max)?;
    Ok(exp_sum_points(&points, k))
}

pub(crate) fn exp_sum_points(points: &SequencePoints, k: i64) -> Complex64 {
    let partial: Vec<Complex64> = points
        .entries
        .par_chunks(CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|p| {
                    let t = k as f64 * p.frac;
                    e(t - t.floor())
                })
                .collect::<ComplexSum>()
                .value()
        })
        .collect();
    partial.into_iter().collect::<ComplexSum>().value()
}
