//! Exact counts of `N_f(Q, delta)`: pairs `(a, q)` with `1 <= q <= Q`,
//! `a/q` in the closed interval `I` and `||q f(a/q)|| < delta`.
//!
//! Three methods must agree: [`count_naive`] enumerates every pair with float
//! evaluation, [`count_fast`] inverts `f` on monotone segments and evaluates
//! only near window boundaries, and [`count_exact_poly`] works in exact
//! rational arithmetic. Float comparisons within a relative guard of `delta`
//! are resolved exactly for polynomial curves; for analytic curves the float
//! comparison stands and the point is counted as `ambiguous`.

mod fast;
mod output;

pub use fast::{count_fast, count_fast_with, FastConfig};
pub use output::{read_csv, write_csv, write_jsonl, CountRow, CSV_HEADER};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{
    exact_gap_below, gap_below, is_integer_value, Curve, ScaledAtQ, ScaledPoly, SmoothFn,
};
use crate::error::{Error, Result};
use crate::rational::{Delta, Interval};

/// Relative float guard around the `delta` boundary.
pub const GUARD: f64 = 1e-12;

/// `min_k |x - k|`.
pub fn dist_nearest_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Height bound, width and interval of a count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountQuery {
    #[serde(rename = "Q")]
    pub q_max: u64,
    pub delta: Delta,
    pub interval: Interval,
}

impl CountQuery {
    /// Rejects `Q = 0` and `delta` outside `(0, 1/2)`.
    pub fn new(q_max: u64, delta: Delta, interval: Interval) -> Result<Self> {
        if q_max == 0 {
            return Err(Error::InvalidArgument("Q must be a positive integer".into()));
        }
        delta.validate()?;
        Ok(CountQuery {
            q_max,
            delta,
            interval,
        })
    }

    /// Whether `delta > 1/Q`, the regime of the asymptotic formula. A flag,
    /// never an error.
    pub fn delta_above_inverse_q(&self) -> bool {
        self.delta.exact() * BigInt::from(self.q_max) > BigRational::from_integer(1.into())
    }

    /// `|I| delta Q^2`.
    pub fn main_term(&self) -> f64 {
        crate::asymptotics::main_term(self.interval.length(), self.q_max, self.delta.as_f64())
    }

    /// `sum_q (floor(q hi) - ceil(q lo) + 1)`, the number of candidate pairs.
    pub fn total_pairs(&self) -> u64 {
        (1..=self.q_max)
            .map(|q| {
                let (s, e) = self.interval.numerators(q);
                (e - s + 1).max(0) as u64
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Fast,
    Exact,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Fast => "fast",
            Method::Exact => "exact",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "fast" => Ok(Method::Fast),
            "exact" => Ok(Method::Exact),
            _ => Err(Error::Parse(format!(
                "unknown method `{s}` (expected naive, fast or exact)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub curve_id: String,
    pub query: CountQuery,
    #[serde(rename = "N")]
    pub n: u64,
    pub main_term: f64,
    pub residual: f64,
    pub ambiguous: u64,
    pub method: Method,
    pub elapsed_ms: f64,
}

impl CountResult {
    fn new(curve: &Curve, query: &CountQuery, tally: Tally, method: Method, start: Instant) -> Self {
        let main_term = query.main_term();
        CountResult {
            curve_id: curve.kind_text(),
            query: *query,
            n: tally.n,
            main_term,
            residual: tally.n as f64 - main_term,
            ambiguous: tally.ambiguous,
            method,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn with_curve_id(mut self, id: impl Into<String>) -> Self {
        self.curve_id = id.into();
        self
    }
}

/// Runs the selected method.
pub fn count(curve: &Curve, query: &CountQuery, method: Method) -> Result<CountResult> {
    match method {
        Method::Naive => count_naive(curve, query),
        Method::Fast => count_fast(curve, query),
        Method::Exact => count_exact_poly(curve, query),
    }
}

/// Hits and boundary-ambiguous evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub n: u64,
    pub ambiguous: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            n: self.n + o.n,
            ambiguous: self.ambiguous + o.ambiguous,
        }
    }
}

impl std::iter::Sum for Tally {
    fn sum<I: Iterator<Item = Tally>>(iter: I) -> Tally {
        iter.fold(Tally::default(), |a, b| a + b)
    }
}

fn check_interval(curve: &Curve, interval: &Interval) -> Result<()> {
    let (lo, hi) = curve.domain();
    let inside = |r: &crate::rational::Rational| {
        let x = crate::rational::to_big(r);
        x >= BigRational::from_float(lo).expect("finite")
            && x <= BigRational::from_float(hi).expect("finite")
    };
    if !inside(&interval.lo) {
        return Err(Error::OutsideDomain {
            x: interval.lo_f64(),
            lo,
            hi,
        });
    }
    if !inside(&interval.hi) {
        return Err(Error::OutsideDomain {
            x: interval.hi_f64(),
            lo,
            hi,
        });
    }
    Ok(())
}

/// The shared float judge of `||q f(a/q)|| < delta` for one fixed `q`.
/// Every method that evaluates a point goes through [`QJudge::judge`].
pub(crate) struct QJudge<'a> {
    curve: &'a Curve,
    q: u64,
    qf: f64,
    delta: f64,
    exact: Option<(&'a ScaledPoly, &'a BigRational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Verdict {
    pub hit: bool,
    pub ambiguous: bool,
}

impl<'a> QJudge<'a> {
    pub(crate) fn new(ctx: &'a Context<'a>, q: u64) -> Self {
        QJudge {
            curve: ctx.curve,
            q,
            qf: q as f64,
            delta: ctx.delta_f64,
            exact: ctx.scaled.as_ref().map(|s| (s, &ctx.delta_exact)),
        }
    }

    /// `q f(x/q)` for real `x`.
    #[inline]
    pub(crate) fn u(&self, x: f64) -> f64 {
        self.qf * self.curve.value(x / self.qf)
    }

    #[inline]
    pub(crate) fn judge(&self, a: i64) -> Verdict {
        self.judge_value(a, self.u(a as f64))
    }

    #[inline]
    pub(crate) fn judge_value(&self, a: i64, u: f64) -> Verdict {
        let dist = dist_nearest_int(u);
        let near = (dist - self.delta).abs() <= GUARD * u.abs().max(1.0);
        match (near, self.exact) {
            (true, Some((sp, delta))) => Verdict {
                hit: exact_gap_below(sp, a, self.q, delta),
                ambiguous: false,
            },
            _ => Verdict {
                hit: dist < self.delta,
                ambiguous: near,
            },
        }
    }
}

/// Per-query state shared by the per-`q` workers.
pub(crate) struct Context<'a> {
    pub curve: &'a Curve,
    pub interval: Interval,
    pub delta_f64: f64,
    pub delta_exact: BigRational,
    pub scaled: Option<ScaledPoly>,
}

impl<'a> Context<'a> {
    pub(crate) fn new(curve: &'a Curve, query: &CountQuery) -> Result<Self> {
        query.delta.validate()?;
        check_interval(curve, &query.interval)?;
        Ok(Context {
            curve,
            interval: query.interval,
            delta_f64: query.delta.as_f64(),
            delta_exact: query.delta.exact(),
            scaled: curve.polynomial_ref().map(|p| p.scaled()),
        })
    }

    fn naive_q(&self, q: u64) -> Tally {
        let judge = QJudge::new(self, q);
        let (s, e) = self.interval.numerators(q);
        let mut t = Tally::default();
        for a in s..=e {
            let v = judge.judge(a);
            t.n += v.hit as u64;
            t.ambiguous += v.ambiguous as u64;
        }
        t
    }
}

/// Exhaustive double loop over `q <= Q` and `a/q` in `I`.
pub fn count_naive(curve: &Curve, query: &CountQuery) -> Result<CountResult> {
    let start = Instant::now();
    let ctx = Context::new(curve, query)?;
    let tally = (1..=query.q_max).map(|q| ctx.naive_q(q)).sum();
    Ok(CountResult::new(curve, query, tally, Method::Naive, start))
}

/// Count for a single denominator `q` by direct enumeration.
pub fn count_naive_at(curve: &Curve, query: &CountQuery, q: u64) -> Result<Tally> {
    Ok(Context::new(curve, query)?.naive_q(q))
}

fn big_at_q(sp: &ScaledPoly, q: u64) -> ScaledAtQ<BigInt> {
    sp.for_q::<BigInt>(q).expect("BigInt never overflows")
}

fn exact_q(sp: &ScaledPoly, interval: &Interval, q: u64, r: &BigInt, s: &BigInt) -> u64 {
    let (start, end) = interval.numerators(q);
    let small_delta = (i128::try_from(r), i128::try_from(s));
    let mut hits = 0;
    let mut big: Option<ScaledAtQ<BigInt>> = None;
    // Checked i128 first; BigInt from the first overflow on.
    let small = sp.for_q::<i128>(q);
    for a in start..=end {
        let fast = match (&small, &small_delta) {
            (Some(sq), (Ok(r), Ok(s))) => sq.numerator(a).and_then(|n| gap_below(&n, &sq.den, r, s)),
            _ => None,
        };
        let hit = match fast {
            Some(h) => h,
            None => {
                let bq = big.get_or_insert_with(|| big_at_q(sp, q));
                let n = bq.numerator(a).expect("BigInt never overflows");
                gap_below(&n, &bq.den, r, s).expect("BigInt never overflows")
            }
        };
        hits += hit as u64;
    }
    hits
}

/// Boundary-exact count for polynomial curves with a rational `delta`:
/// `q f(a/q) = N/D` in integers and `||N/D|| < r/s` is decided exactly.
pub fn count_exact_poly(curve: &Curve, query: &CountQuery) -> Result<CountResult> {
    let start = Instant::now();
    let poly = curve.polynomial_ref().ok_or(Error::NotPolynomial)?;
    let delta = query
        .delta
        .as_rational()
        .ok_or_else(|| Error::IrrationalDelta(query.delta.to_string()))?;
    query.delta.validate()?;
    check_interval(curve, &query.interval)?;
    let sp = poly.scaled();
    let (r, s) = (BigInt::from(*delta.numer()), BigInt::from(*delta.denom()));
    let n = (1..=query.q_max)
        .into_par_iter()
        .map(|q| exact_q(&sp, &query.interval, q, &r, &s))
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let tally = Tally { n, ambiguous: 0 };
    Ok(CountResult::new(curve, query, tally, Method::Exact, start))
}

/// Pairs with `q f(a/q)` exactly an integer, i.e. rational points on the curve.
pub fn on_curve_count(curve: &Curve, interval: &Interval, q_max: u64) -> Result<u64> {
    let poly = curve.polynomial_ref().ok_or(Error::NotPolynomial)?;
    check_interval(curve, interval)?;
    let sp = poly.scaled();
    let per_q = |q: u64| -> u64 {
        let (start, end) = interval.numerators(q);
        let small = sp.for_q::<i128>(q);
        let mut big: Option<ScaledAtQ<BigInt>> = None;
        (start..=end)
            .filter(|&a| {
                let fast = small
                    .as_ref()
                    .and_then(|sq| sq.numerator(a).map(|n| is_integer_value(&n, &sq.den)));
                fast.unwrap_or_else(|| {
                    let bq = big.get_or_insert_with(|| big_at_q(&sp, q));
                    is_integer_value(&bq.numerator(a).expect("BigInt never overflows"), &bq.den)
                })
            })
            .count() as u64
    };
    Ok((1..=q_max)
        .into_par_iter()
        .map(per_q)
        .collect::<Vec<_>>()
        .into_iter()
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn unit() -> Interval {
        Interval::from_ints(0, 1)
    }

    fn half() -> Interval {
        "-1/2,1/2".parse().unwrap()
    }

    fn parabola() -> Curve {
        Curve::poly_ints(&[0, 0, 1], -2.0, 2.0).unwrap()
    }

    fn shifted_parabola() -> Curve {
        Curve::parse("poly:1/2,0,1", Some(Interval::from_ints(-2, 2))).unwrap()
    }

    /// Independent oracle: exact rational arithmetic on each pair.
    fn brute(coeffs: &[Rational], interval: &Interval, q_max: u64, delta: Rational) -> u64 {
        let mut n = 0;
        for q in 1..=q_max as i64 {
            for a in -10 * q..=10 * q {
                let x = Rational::new(a, q);
                if x < interval.lo || x > interval.hi {
                    continue;
                }
                let mut v = Rational::from_integer(0);
                for c in coeffs.iter().rev() {
                    v = v * x + c;
                }
                let u = v * q;
                let frac = u - u.floor();
                let dist = frac.min(Rational::from_integer(1) - frac);
                n += (dist < delta) as u64;
            }
        }
        n
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist_nearest_int(0.5), 0.5);
        assert!((dist_nearest_int(1.3) - 0.3).abs() < 1e-15);
        assert!((dist_nearest_int(-0.2) - 0.2).abs() < 1e-15);
        assert_eq!(dist_nearest_int(-3.0), 0.0);
    }

    #[test]
    fn query_validation() {
        assert!(CountQuery::new(3, Delta::Real(0.7), unit()).is_err());
        assert!(CountQuery::new(3, Delta::Real(0.0), unit()).is_err());
        assert!(CountQuery::new(0, Delta::Real(0.1), unit()).is_err());
        let q = CountQuery::new(3, Delta::rational(1, 3), unit()).unwrap();
        assert!(!q.delta_above_inverse_q());
        let q = CountQuery::new(4, Delta::rational(1, 3), unit()).unwrap();
        assert!(q.delta_above_inverse_q());
        assert_eq!(q.total_pairs(), 2 + 3 + 4 + 5);
    }

    #[test]
    fn naive_examples() {
        let q1 = CountQuery::new(1, Delta::Real(0.1), unit()).unwrap();
        assert_eq!(count_naive(&parabola(), &q1).unwrap().n, 2);
        assert_eq!(count_naive(&shifted_parabola(), &q1).unwrap().n, 0);
        let q3 = CountQuery::new(3, Delta::Real(0.1), unit()).unwrap();
        let r = count_naive(&parabola(), &q3).unwrap();
        assert_eq!((r.n, r.ambiguous), (6, 0));
        assert!((r.main_term - 0.9).abs() < 1e-12);
        assert!((r.residual - 5.1).abs() < 1e-12);
        assert_eq!(r.n, brute(&[0.into(), 0.into(), 1.into()], &unit(), 3, Rational::new(1, 10)));
    }

    #[test]
    fn exact_examples() {
        let q3 = CountQuery::new(3, Delta::rational(1, 10), unit()).unwrap();
        assert_eq!(count_exact_poly(&parabola(), &q3).unwrap().n, 6);
        // q = 3, a = 1: ||1/3|| = 1/3 is not < 1/3.
        let third = CountQuery::new(3, Delta::rational(1, 3), "1/3,1/3".parse().unwrap()).unwrap();
        assert_eq!(count_exact_poly(&parabola(), &third).unwrap().n, 0);
        let wider = CountQuery::new(3, Delta::rational(1001, 3000), "1/3,1/3".parse().unwrap())
            .unwrap();
        assert_eq!(count_exact_poly(&parabola(), &wider).unwrap().n, 1);
        let q500 = CountQuery::new(500, Delta::rational(1, 4), unit()).unwrap();
        let exact = count_exact_poly(&parabola(), &q500).unwrap();
        let naive = count_naive(&parabola(), &q500).unwrap();
        assert_eq!(exact.n, naive.n);
        assert_eq!(exact.ambiguous, 0);
    }

    #[test]
    fn exact_requires_polynomial_and_rational_delta() {
        let cos = Curve::cosine(-1.0, 1.0).unwrap();
        let q = CountQuery::new(3, Delta::rational(1, 10), unit()).unwrap();
        assert!(matches!(count_exact_poly(&cos, &q), Err(Error::NotPolynomial)));
        let q = CountQuery::new(3, Delta::Real(0.1), unit()).unwrap();
        assert!(matches!(
            count_exact_poly(&parabola(), &q),
            Err(Error::IrrationalDelta(_))
        ));
    }

    #[test]
    fn float_boundary_points_resolved_exactly() {
        // For q = 4 and odd a, ||a^2/4|| = 1/4: with delta = 0.25 these sit
        // on the float guard and the exact check must exclude them.
        let q = CountQuery::new(4, Delta::Real(0.25), unit()).unwrap();
        let r = count_naive(&parabola(), &q).unwrap();
        let exact = count_exact_poly(
            &parabola(),
            &CountQuery::new(4, Delta::rational(1, 4), unit()).unwrap(),
        )
        .unwrap();
        assert_eq!((r.n, r.ambiguous), (exact.n, 0));
    }

    #[test]
    fn interval_must_lie_in_domain() {
        let c = Curve::poly_ints(&[0, 0, 1], 0.0, 1.0).unwrap();
        let q = CountQuery::new(3, Delta::Real(0.1), "0,2".parse().unwrap()).unwrap();
        assert!(matches!(count_naive(&c, &q), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn on_curve_examples() {
        assert_eq!(on_curve_count(&parabola(), &unit(), 4).unwrap(), 9);
        assert_eq!(on_curve_count(&shifted_parabola(), &unit(), 2).unwrap(), 2);
        let line = Curve::poly_ints(&[0, 1], -2.0, 2.0).unwrap();
        let q = CountQuery::new(7, Delta::Real(0.1), unit()).unwrap();
        assert_eq!(on_curve_count(&line, &unit(), 7).unwrap(), q.total_pairs());
        let cos = Curve::cosine(-1.0, 1.0).unwrap();
        assert!(on_curve_count(&cos, &unit(), 3).is_err());
    }

    #[test]
    fn exact_matches_brute_force_on_cubic() {
        let coeffs = [Rational::new(1, 7), Rational::new(-2, 3), 0.into(), Rational::new(5, 2)];
        let c = Curve::polynomial(crate::curves::Polynomial::new(coeffs.to_vec()), -1.0, 1.0)
            .unwrap();
        for &(p, s) in &[(1, 10), (1, 4), (2, 5), (1, 3)] {
            let q = CountQuery::new(25, Delta::rational(p, s), half()).unwrap();
            assert_eq!(
                count_exact_poly(&c, &q).unwrap().n,
                brute(&coeffs, &half(), 25, Rational::new(p, s))
            );
        }
    }

    #[test]
    fn huge_coefficients_fall_back_to_bigint() {
        let big = i64::MAX / 3;
        let c = Curve::poly_ints(&[0, 0, 0, 0, 0, 0, 0, big], -1.0, 1.0).unwrap();
        let q = CountQuery::new(40, Delta::rational(1, 10), unit()).unwrap();
        let (r, s) = (BigInt::from(1), BigInt::from(10));
        let mut want = 0;
        for qq in 1..=40i64 {
            for a in 0..=qq {
                // q f(a/q) = big a^7 / q^6
                let n = BigInt::from(big) * BigInt::from(a).pow(7);
                let d = BigInt::from(qq).pow(6);
                want += gap_below(&n, &d, &r, &s).unwrap() as u64;
            }
        }
        assert_eq!(count_exact_poly(&c, &q).unwrap().n, want);
        // a = 0 and a = q are on the curve for every q.
        assert!(on_curve_count(&c, &unit(), 40).unwrap() >= 80);
    }
}
