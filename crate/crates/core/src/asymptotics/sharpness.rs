use serde::Serialize;

use crate::counting::{count_fast, on_curve_count, CountQuery};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::rational::{Delta, Interval, Rational};

/// Pairs `(aq, q^2)` with `0 <= a <= q` against the exact on-curve count of
/// `x^2` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParabolaSharpness {
    #[serde(rename = "Q")]
    pub q_max: u64,
    pub construction_count: u64,
    pub on_curve_count: u64,
    pub verified: bool,
}

pub fn sharpness_parabola(q_max: u64) -> Result<ParabolaSharpness> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("Q must be at least 1".into()));
    }
    let root = q_max.isqrt();
    let construction_count = (1..=root).map(|q| q + 1).sum();
    let curve = Curve::poly_ints(&[0, 0, 1], 0.0, 1.0)?;
    let on_curve = on_curve_count(&curve, &Interval::from_ints(0, 1), q_max)?;
    Ok(ParabolaSharpness {
        q_max,
        construction_count,
        on_curve_count: on_curve,
        verified: on_curve >= construction_count,
    })
}

/// Width as a function of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DeltaRule {
    /// `Q^(-1/(d-1)) / 2`, where the flat-point term dominates.
    Default,
    Constant(f64),
}

impl DeltaRule {
    pub fn delta(&self, d: u32, q: u64) -> f64 {
        match *self {
            DeltaRule::Default => 0.5 * (q as f64).powf(-1.0 / (d as f64 - 1.0)),
            DeltaRule::Constant(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermatRow {
    #[serde(rename = "Q")]
    pub q: u64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: u64,
    /// `delta^(1/d) Q^(2 - 1/d) + delta Q^2`
    pub shape: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FermatSharpness {
    pub d: u32,
    pub interval: Interval,
    pub rows: Vec<FermatRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// All ratios positive and `max <= 2 min`.
    pub stable: bool,
}

/// Counts near `y -> (1 - y^d)^(1/d)`, which is flat of order `d` at `y = 0`.
/// The interval defaults to `[0, 1/2]`.
pub fn sharpness_fermat(
    d: u32,
    qs: &[u64],
    rule: DeltaRule,
    interval: Option<Interval>,
) -> Result<FermatSharpness> {
    if d < 2 {
        return Err(Error::InvalidArgument("Fermat degree must be at least 2".into()));
    }
    if qs.is_empty() {
        return Err(Error::InvalidArgument("Q list is empty".into()));
    }
    let interval = interval.unwrap_or(Interval {
        lo: Rational::from_integer(0),
        hi: Rational::new(1, 2),
    });
    let curve = Curve::fermat(d, interval.lo_f64(), interval.hi_f64())?;
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let delta = rule.delta(d, q);
        let query = CountQuery::new(q, Delta::Real(delta), interval)?;
        let n = count_fast(&curve, &query)?.n;
        let qf = q as f64;
        let df = d as f64;
        let shape = delta.powf(1.0 / df) * qf.powf(2.0 - 1.0 / df) + delta * qf * qf;
        rows.push(FermatRow {
            q,
            delta,
            n,
            shape,
            ratio: n as f64 / shape,
        });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(FermatSharpness {
        d,
        interval,
        rows,
        min_ratio,
        max_ratio,
        stable: min_ratio > 0.0 && max_ratio <= 2.0 * min_ratio,
    })
}
