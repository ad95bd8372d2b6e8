//! Text grammar for curves:
//!
//! ```text
//! poly: c0,c1,...,cn      c_k exact rationals (p/q, integers or decimals)
//! exp: c0,c1,...,cn       exp of a polynomial
//! cos
//! fermat:d                y -> (1 - y^d)^(1/d)
//! ```
//!
//! optionally followed by `; interval: lo,hi` giving the domain.

use std::fmt;
use std::str::FromStr;

use crate::curves::{Curve, CurveKind, Polynomial};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Interval, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum KindSpec {
    Poly(Vec<Rational>),
    Exp(Vec<Rational>),
    Cos,
    Fermat(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub kind: KindSpec,
    pub interval: Option<Interval>,
}

impl KindSpec {
    pub(crate) fn from_kind(kind: &CurveKind) -> Self {
        match kind {
            CurveKind::Polynomial(p) => KindSpec::Poly(p.coeffs().to_vec()),
            CurveKind::ExpPoly(p) => KindSpec::Exp(p.coeffs().to_vec()),
            CurveKind::Cosine => KindSpec::Cos,
            CurveKind::Fermat { d } => KindSpec::Fermat(*d),
        }
    }

    fn to_kind(&self) -> CurveKind {
        match self {
            KindSpec::Poly(c) => CurveKind::Polynomial(Polynomial::new(c.clone())),
            KindSpec::Exp(c) => CurveKind::ExpPoly(Polynomial::new(c.clone())),
            KindSpec::Cos => CurveKind::Cosine,
            KindSpec::Fermat(d) => CurveKind::Fermat { d: *d },
        }
    }
}

fn parse_coeffs(body: &str) -> Result<Vec<Rational>> {
    if body.trim().is_empty() {
        return Err(Error::Parse("polynomial needs at least one coefficient".into()));
    }
    body.split(',').map(parse_rational).collect()
}

impl FromStr for KindSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, body) = match s.split_once(':') {
            Some((h, b)) => (h.trim(), Some(b.trim())),
            None => (s, None),
        };
        match (head, body) {
            ("poly", Some(b)) => Ok(KindSpec::Poly(parse_coeffs(b)?)),
            ("exp", Some(b)) => Ok(KindSpec::Exp(parse_coeffs(b)?)),
            ("cos", None) => Ok(KindSpec::Cos),
            ("fermat", Some(b)) => b
                .parse::<u32>()
                .ok()
                .filter(|&d| d >= 2)
                .map(KindSpec::Fermat)
                .ok_or_else(|| Error::Parse(format!("fermat degree must be an integer >= 2, got `{b}`"))),
            _ => Err(Error::Parse(format!("unknown curve `{s}`"))),
        }
    }
}

fn join(c: &[Rational]) -> String {
    c.iter()
        .map(|r| {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for KindSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KindSpec::Poly(c) => write!(f, "poly:{}", join(c)),
            KindSpec::Exp(c) => write!(f, "exp:{}", join(c)),
            KindSpec::Cos => f.write_str("cos"),
            KindSpec::Fermat(d) => write!(f, "fermat:{d}"),
        }
    }
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(';');
        let kind: KindSpec = parts.next().unwrap_or("").parse()?;
        let mut interval = None;
        for clause in parts {
            let clause = clause.trim();
            if clause.is_empty() {
                continue;
            }
            match clause.split_once(':') {
                Some((key, value)) if key.trim() == "interval" => {
                    interval = Some(value.trim().parse()?);
                }
                _ => return Err(Error::Parse(format!("unknown curve clause `{clause}`"))),
            }
        }
        Ok(CurveSpec { kind, interval })
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(i) = &self.interval {
            write!(f, "; interval:{i}")?;
        }
        Ok(())
    }
}

impl CurveSpec {
    pub fn to_curve(&self, fallback: Option<Interval>) -> Result<Curve> {
        let interval = self
            .interval
            .or(fallback)
            .ok_or_else(|| Error::Parse("curve needs an interval".into()))?;
        Curve::new(self.kind.to_kind(), interval.lo_f64(), interval.hi_f64())
    }
}
