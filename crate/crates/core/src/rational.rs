//! Exact rational literals, closed intervals with rational endpoints, and the
//! `delta` parameter that may be either exact or a plain float.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` into an exact
/// rational. Decimals are read digit by digit, never through `f64`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Ratio::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("bad rational literal `{s}`")));
    }
    let overflow = || Error::Parse(format!("rational literal `{s}` overflows i64"));
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| overflow())?
    };
    let denom = 10i64
        .checked_pow(frac_part.len() as u32)
        .ok_or_else(overflow)?;
    let r = Ratio::new(numer, denom);
    Ok(if neg { -r } else { r })
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn to_big(r: &Rational) -> BigRational {
    Ratio::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "interval endpoints out of order: {} > {}",
                fmt_rational(&lo),
                fmt_rational(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn from_ints(lo: i64, hi: i64) -> Self {
        Interval::new(Ratio::from_integer(lo), Ratio::from_integer(hi)).expect("ordered")
    }

    pub fn lo_f64(&self) -> f64 {
        rational_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational_to_f64(&self.hi)
    }

    pub fn length(&self) -> f64 {
        rational_to_f64(&(self.hi - self.lo))
    }

    /// Integers `a` with `a/q` in the interval, as an inclusive range
    /// (empty when `start > end`).
    pub fn numerators(&self, q: u64) -> (i64, i64) {
        let q = q as i128;
        let (ln, ld) = (*self.lo.numer() as i128, *self.lo.denom() as i128);
        let (hn, hd) = (*self.hi.numer() as i128, *self.hi.denom() as i128);
        let start = ceil_div(ln * q, ld);
        let end = floor_div(hn * q, hd);
        (start as i64, end as i64)
    }

    pub fn negated(&self) -> Self {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let d = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        d - 1
    } else {
        d
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("interval must be `lo,hi`, got `{s}`")))?;
        Interval::new(parse_rational(lo)?, parse_rational(hi)?)
    }
}

/// Width parameter of the near-curve condition.
///
/// `Rational` values come from `p/q` literals and allow boundary-exact
/// counting; `Real` values come from decimal literals and use float paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delta {
    Rational(Rational),
    Real(f64),
}

impl Delta {
    pub fn rational(p: i64, q: i64) -> Self {
        Delta::Rational(Ratio::new(p, q))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Delta::Rational(r) => rational_to_f64(r),
            Delta::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Delta::Rational(r) => Some(*r),
            Delta::Real(_) => None,
        }
    }

    /// Exact value: the rational itself, or the binary value of the float.
    pub fn exact(&self) -> BigRational {
        match self {
            Delta::Rational(r) => to_big(r),
            Delta::Real(x) => BigRational::from_float(*x).expect("finite delta"),
        }
    }

    /// Checks `0 < delta < 1/2`.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Delta::Rational(r) => r.is_positive() && *r * 2 < Ratio::from_integer(1),
            Delta::Real(x) => x.is_finite() && *x > 0.0 && *x < 0.5,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDelta(self.to_string()))
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Rational(r) => f.write_str(&fmt_rational(r)),
            Delta::Real(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Delta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            Ok(Delta::Rational(parse_rational(s)?))
        } else {
            s.parse::<f64>()
                .map(Delta::Real)
                .map_err(|_| Error::Parse(format!("bad delta `{s}`")))
        }
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Delta::Rational(r) => serializer.serialize_str(&fmt_rational(r)),
            Delta::Real(x) => serializer.serialize_f64(*x),
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Delta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct DeltaVisitor;

        impl Visitor<'_> for DeltaVisitor {
            type Value = Delta;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a p/q string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Delta, E> {
                Ok(Delta::Real(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Delta, E> {
                Ok(Delta::Real(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Delta, E> {
                Ok(Delta::Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Delta, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(DeltaVisitor)
    }
}

/// Converts an exact rational to the nearest `f64` (used for reporting only).
pub fn big_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), Ratio::new(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), Ratio::from_integer(-2));
        assert_eq!(parse_rational("0.1").unwrap(), Ratio::new(1, 10));
        assert_eq!(parse_rational("-.5").unwrap(), Ratio::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn numerators_are_exact_at_endpoints() {
        let i: Interval = "-1/2,1/2".parse().unwrap();
        assert_eq!(i.numerators(4), (-2, 2));
        assert_eq!(i.numerators(3), (-1, 1));
        let unit = Interval::from_ints(0, 1);
        assert_eq!(unit.numerators(3), (0, 3));
        let point: Interval = "1/3,1/3".parse().unwrap();
        assert_eq!(point.numerators(2), (1, 0));
        assert_eq!(point.numerators(6), (2, 2));
    }

    #[test]
    fn delta_validation() {
        assert!(Delta::rational(1, 10).validate().is_ok());
        assert!(Delta::rational(1, 2).validate().is_err());
        assert!(Delta::Real(0.7).validate().is_err());
        assert!(Delta::Real(0.0).validate().is_err());
        assert!("1/4".parse::<Delta>().unwrap().as_rational().is_some());
        assert!("0.25".parse::<Delta>().unwrap().as_rational().is_none());
        assert_eq!(Delta::Real(0.25).exact(), to_big(&Ratio::new(1, 4)));
    }
}
