//! Weighted sums over rationals `j/k` near a curve `F` with `F'' ~ 1`,
//! compared with the growth shapes they are known to obey.
//!
//! Each variant sums over `j/k` in `I` a weight depending on
//! `n = ||k F(j/k)||` and on whether `n` exceeds `1/Q0`:
//!
//! | variant | range of k      | condition     | weight              |
//! |---------|-----------------|---------------|---------------------|
//! | 2.40    | `k <= K0`       | `n > 1/Q0`    | `k^-1/2 n^-1/2`     |
//! | 2.41    | `k <= K0`       | `n > 1/Q0`    | `k^-1/2 n^-1`       |
//! | 2.42    | `k <= K0`       | `n <= 1/Q0`   | `k^-1/2`            |
//! | 2.43    | `K1 < k <= K2`  | `n > 1/Q0`    | `k^-3/2 n^-1/2`     |
//! | 2.44    | `K1 < k <= K2`  | `n > 1/Q0`    | `k^-3/2 n^-1`       |
//! | 2.45    | `K1 < k <= K2`  | `n <= 1/Q0`   | `k^-3/2`            |

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::kahan::real_sum;
use crate::counting::dist_nearest_int;
use crate::curves::{Curve, ScaledAtQ, ScaledPoly, SmoothFn};
use crate::error::{Error, Result};
use crate::rational::Interval;

/// Default exponent of the `Q0^eps` factors.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DualVariant {
    #[serde(rename = "2.40")]
    V240,
    #[serde(rename = "2.41")]
    V241,
    #[serde(rename = "2.42")]
    V242,
    #[serde(rename = "2.43")]
    V243,
    #[serde(rename = "2.44")]
    V244,
    #[serde(rename = "2.45")]
    V245,
}

impl DualVariant {
    pub const ALL: [DualVariant; 6] = [
        DualVariant::V240,
        DualVariant::V241,
        DualVariant::V242,
        DualVariant::V243,
        DualVariant::V244,
        DualVariant::V245,
    ];

    /// Whether the `k` range is `K1 < k <= K2` rather than `k <= K0`.
    pub fn is_ranged(self) -> bool {
        matches!(self, DualVariant::V243 | DualVariant::V244 | DualVariant::V245)
    }

    /// Whether the sum runs over `n <= 1/Q0` rather than `n > 1/Q0`.
    fn near(self) -> bool {
        matches!(self, DualVariant::V242 | DualVariant::V245)
    }

    fn k_power(self) -> f64 {
        if self.is_ranged() {
            -1.5
        } else {
            -0.5
        }
    }

    fn n_power(self) -> f64 {
        match self {
            DualVariant::V240 | DualVariant::V243 => -0.5,
            DualVariant::V241 | DualVariant::V244 => -1.0,
            DualVariant::V242 | DualVariant::V245 => 0.0,
        }
    }

    /// The bounding shape with unit constants. `k` is `K0` or `K2`.
    pub fn rhs_shape(self, k1: u64, k: u64, q0: f64, eps: f64) -> f64 {
        let k = k as f64;
        let k1 = k1 as f64;
        let lk = k.ln();
        let lk1 = k1.ln();
        match self {
            DualVariant::V240 => k.powf(1.5) + k.sqrt() * lk * q0.sqrt(),
            DualVariant::V241 => k.powf(1.5) * q0.powf(eps) + k.sqrt() * lk * q0,
            DualVariant::V242 => k.powf(1.5) * q0.powf(eps - 1.0) + k.sqrt() * lk,
            DualVariant::V243 => k.sqrt() + lk1 / k1.sqrt() * q0.sqrt(),
            DualVariant::V244 => k.sqrt() * q0.powf(eps) + lk1 / k1.sqrt() * q0,
            DualVariant::V245 => k.sqrt() * q0.powf(eps - 1.0) + lk1 / k1.sqrt(),
        }
    }
}

impl fmt::Display for DualVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualVariant::V240 => "2.40",
            DualVariant::V241 => "2.41",
            DualVariant::V242 => "2.42",
            DualVariant::V243 => "2.43",
            DualVariant::V244 => "2.44",
            DualVariant::V245 => "2.45",
        })
    }
}

impl FromStr for DualVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DualVariant::ALL
            .into_iter()
            .find(|v| v.to_string() == s || v.to_string()[2..] == *s)
            .ok_or_else(|| Error::Parse(format!("unknown dual-sum variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualSumQuery {
    pub variant: DualVariant,
    pub interval: Interval,
    /// `K1`; zero for the unranged variants.
    pub k1: u64,
    /// `K0`, or `K2` for the ranged variants.
    pub k: u64,
    pub q0: f64,
    pub epsilon: f64,
}

impl DualSumQuery {
    /// Query with `K1 = K2 / 2` for the ranged variants and the default
    /// epsilon.
    pub fn new(variant: DualVariant, interval: Interval, k: u64, q0: f64) -> Result<Self> {
        let k1 = if variant.is_ranged() { k / 2 } else { 0 };
        DualSumQuery {
            variant,
            interval,
            k1,
            k,
            q0,
            epsilon: DEFAULT_EPSILON,
        }
        .validated()
    }

    pub fn with_k1(mut self, k1: u64) -> Result<Self> {
        self.k1 = k1;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.k == 0 || !(self.q0 > 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(
                "dual sums need K >= 1, Q0 > 0 and epsilon > 0".into(),
            ));
        }
        if self.variant.is_ranged() && !(self.k1 >= 1 && self.k1 < self.k) {
            return Err(Error::InvalidArgument(format!(
                "variant {} needs 1 <= K1 < K2, got K1 = {}, K2 = {}",
                self.variant, self.k1, self.k
            )));
        }
        Ok(self)
    }

    fn k_range(&self) -> std::ops::RangeInclusive<u64> {
        if self.variant.is_ranged() {
            self.k1 + 1..=self.k
        } else {
            1..=self.k
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualSumReport {
    pub variant: DualVariant,
    #[serde(rename = "K0_or_K1")]
    pub k0_or_k1: u64,
    #[serde(rename = "K2")]
    pub k2: Option<u64>,
    #[serde(rename = "Q0")]
    pub q0: f64,
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
}

fn report(query: &DualSumQuery, per_k: Vec<f64>) -> DualSumReport {
    let lhs = real_sum(per_k);
    let rhs_shape = query
        .variant
        .rhs_shape(query.k1, query.k, query.q0, query.epsilon);
    let (k0_or_k1, k2) = if query.variant.is_ranged() {
        (query.k1, Some(query.k))
    } else {
        (query.k, None)
    };
    DualSumReport {
        variant: query.variant,
        k0_or_k1,
        k2,
        q0: query.q0,
        lhs,
        rhs_shape,
        ratio: lhs / rhs_shape,
    }
}

fn weight(query: &DualSumQuery, k: u64, n: f64) -> f64 {
    let v = query.variant;
    let kw = (k as f64).powf(v.k_power());
    let p = v.n_power();
    if p == 0.0 {
        kw
    } else if p == -1.0 {
        kw / n
    } else {
        kw / n.sqrt()
    }
}

/// Exact enumeration of the selected sum. Polynomial `F` with an integral
/// `Q0` compares `n` against `1/Q0` exactly; other curves use floats.
pub fn dual_sums(f: &Curve, query: &DualSumQuery) -> Result<DualSumReport> {
    let q0_int = (query.q0.fract() == 0.0 && query.q0 < 1e15).then_some(query.q0 as i128);
    match (f.polynomial_ref(), q0_int) {
        (Some(p), Some(q0)) => Ok(exact(&p.scaled(), query, q0)),
        _ => dual_sums_smooth(f, query),
    }
}

fn exact(sp: &ScaledPoly, query: &DualSumQuery, q0: i128) -> DualSumReport {
    let per_k: Vec<f64> = query
        .k_range()
        .into_par_iter()
        .map(|k| {
            let at: Option<ScaledAtQ<i128>> = sp.for_q(k);
            let (s, t) = query.interval.numerators(k);
            let mut terms = Vec::new();
            for j in s..=t {
                let exact = at.as_ref().and_then(|sq| {
                    let num = sq.numerator(j)?;
                    let r = num.mod_floor(&sq.den);
                    let gap = r.min(sq.den - r);
                    // n > 1/Q0  <=>  gap Q0 > den
                    let far = gap.checked_mul(q0)? > sq.den;
                    Some((far, gap as f64 / sq.den as f64))
                });
                let (far, n) = exact.unwrap_or_else(|| {
                    let n = big_gap(sp, j, k);
                    (n > 1.0 / query.q0, n)
                });
                if far != query.variant.near() {
                    terms.push(weight(query, k, n));
                }
            }
            real_sum(terms)
        })
        .collect();
    report(query, per_k)
}

fn big_gap(sp: &ScaledPoly, j: i64, k: u64) -> f64 {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let at: ScaledAtQ<BigInt> = sp.for_q(k).expect("BigInt never overflows");
    let num = at.numerator(j).expect("BigInt never overflows");
    let r = num.mod_floor(&at.den);
    let gap = (&at.den - &r).min(r);
    crate::rational::big_to_f64(&BigRational::new(gap, at.den))
}

/// Float enumeration for any smooth `F`, e.g. a dual curve.
pub fn dual_sums_smooth<F: SmoothFn + ?Sized>(f: &F, query: &DualSumQuery) -> Result<DualSumReport> {
    let (lo, hi) = f.domain();
    if query.interval.lo_f64() < lo || query.interval.hi_f64() > hi {
        return Err(Error::OutsideDomain {
            x: query.interval.lo_f64(),
            lo,
            hi,
        });
    }
    let per_k: Vec<f64> = query
        .k_range()
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            let (s, t) = query.interval.numerators(k);
            real_sum((s..=t).filter_map(|j| {
                let n = dist_nearest_int(kf * f.value(j as f64 / kf));
                let far = n > 1.0 / query.q0;
                (far != query.variant.near()).then(|| weight(query, k, n))
            }))
        })
        .collect();
    Ok(report(query, per_k))
}

/// `variant,K0_or_K1,K2,Q0,lhs,rhs_shape,ratio` rows.
pub fn write_dual_csv<W: Write>(out: W, comments: &[String], rows: &[DualSumReport]) -> Result<()> {
    let mut out = out;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "K0_or_K1", "K2", "Q0", "lhs", "rhs_shape", "ratio"])?;
    for r in rows {
        w.write_record([
            r.variant.to_string(),
            r.k0_or_k1.to_string(),
            r.k2.map(|k| k.to_string()).unwrap_or_default(),
            r.q0.to_string(),
            r.lhs.to_string(),
            r.rhs_shape.to_string(),
            r.ratio.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_curve() -> Curve {
        Curve::parse("poly:0,1/4,1/2", Some("-1,2".parse().unwrap())).unwrap()
    }

    fn unit() -> Interval {
        Interval::from_ints(0, 1)
    }

    /// Oracle with exact rationals: `k F(j/k) = j^2/(2k) + j/4`.
    fn oracle(variant: DualVariant, k_lo: u64, k_hi: u64, q0: i64) -> f64 {
        use num_rational::Ratio;
        let mut s = 0.0;
        for k in k_lo..=k_hi {
            for j in 0..=k as i64 {
                let v = Ratio::new(j * j, 2 * k as i64) + Ratio::new(j, 4);
                let fr = v - v.floor();
                let n = fr.min(Ratio::from_integer(1) - fr);
                let far = n > Ratio::new(1, q0);
                let nf = *n.numer() as f64 / *n.denom() as f64;
                let kf = k as f64;
                s += match (variant, far) {
                    (DualVariant::V240, true) => kf.powf(-0.5) * nf.powf(-0.5),
                    (DualVariant::V241, true) => kf.powf(-0.5) / nf,
                    (DualVariant::V242, false) => kf.powf(-0.5),
                    (DualVariant::V243, true) => kf.powf(-1.5) * nf.powf(-0.5),
                    (DualVariant::V244, true) => kf.powf(-1.5) / nf,
                    (DualVariant::V245, false) => kf.powf(-1.5),
                    _ => 0.0,
                };
            }
        }
        s
    }

    #[test]
    fn hand_enumeration() {
        // j = 0: ||0|| = 0 <= 1/10 contributes 1; j = 1: ||3/4|| = 1/4.
        let q = DualSumQuery::new(DualVariant::V242, unit(), 1, 10.0).unwrap();
        assert_eq!(dual_sums(&test_curve(), &q).unwrap().lhs, 1.0);
    }

    #[test]
    fn empty_interval_sums_to_zero() {
        let i: Interval = "1/3,1/3".parse().unwrap();
        let q = DualSumQuery::new(DualVariant::V240, i, 2, 10.0).unwrap();
        assert_eq!(dual_sums(&test_curve(), &q).unwrap().lhs, 0.0);
    }

    #[test]
    fn all_variants_match_oracle() {
        let f = test_curve();
        for v in DualVariant::ALL {
            let q = DualSumQuery::new(v, unit(), 40, 100.0).unwrap();
            let (lo, hi) = if v.is_ranged() { (21, 40) } else { (1, 40) };
            let want = oracle(v, lo, hi, 100);
            let got = dual_sums(&f, &q).unwrap();
            assert!((got.lhs - want).abs() <= 1e-10 * want.max(1.0), "{v}: {} vs {want}", got.lhs);
            let float = dual_sums_smooth(&f, &q).unwrap();
            assert!((float.lhs - want).abs() <= 1e-6 * want.max(1.0), "{v}");
        }
    }

    #[test]
    fn rhs_shapes() {
        let v = DualVariant::V240;
        let k: f64 = 50.0;
        assert!((v.rhs_shape(0, 50, 100.0, 0.1) - (k.powf(1.5) + k.sqrt() * k.ln() * 10.0)).abs() < 1e-9);
        assert!((DualVariant::V245.rhs_shape(2, 4, 10.0, 0.1) - (2.0 * 10f64.powf(-0.9) + 2f64.ln() / 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn variant_names_and_ranges() {
        assert_eq!("2.43".parse::<DualVariant>().unwrap(), DualVariant::V243);
        assert_eq!("41".parse::<DualVariant>().unwrap(), DualVariant::V241);
        assert!("2.46".parse::<DualVariant>().is_err());
        let q = DualSumQuery::new(DualVariant::V244, unit(), 50, 10.0).unwrap();
        assert_eq!(q.k1, 25);
        assert!(DualSumQuery::new(DualVariant::V244, unit(), 1, 10.0).is_err());
    }

    #[test]
    fn csv_columns() {
        let q = DualSumQuery::new(DualVariant::V243, unit(), 8, 10.0).unwrap();
        let r = dual_sums(&test_curve(), &q).unwrap();
        let mut buf = Vec::new();
        write_dual_csv(&mut buf, &[], &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("variant,K0_or_K1,K2,Q0,lhs,rhs_shape,ratio"));
        assert!(lines.next().unwrap().starts_with("2.43,4,8,10,"));
    }
}
