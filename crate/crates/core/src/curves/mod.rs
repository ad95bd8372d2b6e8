//! Planar graph curves `t -> (t, f(t))`: derivative evaluation, finite-type
//! classification, model-case decomposition and dual curves.

mod dual;
mod jet;
mod model;
mod poly;
mod spec;

pub use dual::DualCurve;
pub use model::{
    certify_hypotheses, model_decompose, model_decompose_with, CertificationReport, H1Report,
    H2Report, H3Report, ModelCase, ModelConfig, Monotonicity,
};
pub use poly::{Polynomial, ScaledAtQ, ScaledPoly};
pub use spec::{CurveSpec, KindSpec};

pub(crate) use poly::exact_gap_below;
pub(crate) use poly::{gap_below, is_integer_value};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::big_to_f64;

/// Derivative order supported by the analytic (non-polynomial) kinds.
pub const MAX_ANALYTIC_ORDER: usize = 24;

/// Default tolerance of [`classify_type`] for analytic kinds.
pub const DEFAULT_TYPE_TOL: f64 = 1e-9;

/// A real function on a closed interval with analytic derivatives.
pub trait SmoothFn: Send + Sync {
    fn domain(&self) -> (f64, f64);

    fn max_order(&self) -> usize;

    /// Unchecked float evaluation of the `order`-th derivative.
    fn derivative(&self, order: usize, x: f64) -> f64;

    fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// Derivatives `0..=n` at `x`.
    fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| self.derivative(k, x)).collect()
    }
}

impl<T: SmoothFn + ?Sized> SmoothFn for &T {
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn max_order(&self) -> usize {
        (**self).max_order()
    }
    fn derivative(&self, order: usize, x: f64) -> f64 {
        (**self).derivative(order, x)
    }
    fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        (**self).derivatives(x, n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    Polynomial(Polynomial),
    /// `cos x`
    Cosine,
    /// `exp(p(x))`
    ExpPoly(Polynomial),
    /// `(1 - y^d)^(1/d)`, the Fermat curve as a graph over its flat direction.
    Fermat { d: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    lo: f64,
    hi: f64,
}

impl Curve {
    pub fn new(kind: CurveKind, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidArgument(format!("bad domain [{lo}, {hi}]")));
        }
        if let CurveKind::Fermat { d } = kind {
            if d < 2 {
                return Err(Error::InvalidArgument("fermat degree must be >= 2".into()));
            }
            if hi >= 1.0 || (d % 2 == 0 && lo <= -1.0) {
                return Err(Error::InvalidArgument(format!(
                    "fermat:{d} domain [{lo}, {hi}] must avoid the singular points |y| = 1"
                )));
            }
        }
        Ok(Curve { kind, lo, hi })
    }

    pub fn polynomial(p: Polynomial, lo: f64, hi: f64) -> Result<Self> {
        Curve::new(CurveKind::Polynomial(p), lo, hi)
    }

    /// Polynomial with integer coefficients (increasing degree order).
    pub fn poly_ints(coeffs: &[i64], lo: f64, hi: f64) -> Result<Self> {
        Curve::polynomial(Polynomial::from_ints(coeffs), lo, hi)
    }

    pub fn cosine(lo: f64, hi: f64) -> Result<Self> {
        Curve::new(CurveKind::Cosine, lo, hi)
    }

    pub fn fermat(d: u32, lo: f64, hi: f64) -> Result<Self> {
        Curve::new(CurveKind::Fermat { d }, lo, hi)
    }

    /// Builds a curve from text such as `poly: 0,0,1; interval: 0,1`.
    /// `fallback` supplies the domain when the text has no `interval` clause.
    pub fn parse(text: &str, fallback: Option<crate::rational::Interval>) -> Result<Self> {
        text.parse::<CurveSpec>()?.to_curve(fallback)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn polynomial_ref(&self) -> Option<&Polynomial> {
        match &self.kind {
            CurveKind::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    /// Canonical kind text, e.g. `poly:0,0,1` or `fermat:3`.
    pub fn kind_text(&self) -> String {
        KindSpec::from_kind(&self.kind).to_string()
    }

    pub fn deriv_order_max(&self) -> usize {
        match &self.kind {
            CurveKind::Polynomial(p) => MAX_ANALYTIC_ORDER.max(p.degree() + 2),
            _ => MAX_ANALYTIC_ORDER,
        }
    }

    fn check(&self, order: usize, x: f64) -> Result<()> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(Error::OutsideDomain {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let max = self.deriv_order_max();
        if order > max {
            return Err(Error::OrderOutOfRange { order, max });
        }
        Ok(())
    }

    /// Checked derivative evaluation. Polynomials are evaluated exactly at the
    /// binary value of `x` and rounded once.
    pub fn eval_derivative(&self, order: usize, x: f64) -> Result<f64> {
        self.check(order, x)?;
        Ok(match &self.kind {
            CurveKind::Polynomial(p) => {
                let xr = BigRational::from_float(x).expect("finite");
                big_to_f64(&p.derivative_exact(order, &xr))
            }
            _ => self.derivative(order, x),
        })
    }

    /// Exact derivative of a polynomial curve at a rational point.
    pub fn eval_derivative_exact(&self, order: usize, x: &BigRational) -> Result<BigRational> {
        match &self.kind {
            CurveKind::Polynomial(p) => Ok(p.derivative_exact(order, x)),
            _ => Err(Error::NotPolynomial),
        }
    }

    /// Points of `(lo, hi)` where `f'` changes sign; between consecutive
    /// points `f` is strictly monotone. `None` if the kind has no segmentation.
    pub fn turning_points(&self, lo: f64, hi: f64) -> Option<Vec<f64>> {
        match &self.kind {
            CurveKind::Polynomial(p) => Some(p.turning_points(lo, hi)),
            CurveKind::ExpPoly(p) => Some(p.turning_points(lo, hi)),
            CurveKind::Cosine => {
                let pi = std::f64::consts::PI;
                let first = (lo / pi).floor() as i64;
                let last = (hi / pi).ceil() as i64;
                Some(
                    (first..=last)
                        .map(|k| k as f64 * pi)
                        .filter(|&x| x > lo && x < hi)
                        .collect(),
                )
            }
            CurveKind::Fermat { d } => {
                if d % 2 == 0 && lo < 0.0 && hi > 0.0 {
                    Some(vec![0.0])
                } else {
                    Some(Vec::new())
                }
            }
        }
    }

    pub fn negated_poly(&self) -> Option<Curve> {
        self.polynomial_ref().map(|p| Curve {
            kind: CurveKind::Polynomial(p.negated()),
            lo: self.lo,
            hi: self.hi,
        })
    }

    /// The polynomial `x -> p(-x)` on the reflected domain.
    pub fn reflected_poly(&self) -> Option<Curve> {
        self.polynomial_ref().map(|p| Curve {
            kind: CurveKind::Polynomial(p.reflected()),
            lo: -self.hi,
            hi: -self.lo,
        })
    }

    fn fermat_jet(d: u32, y: f64, n: usize) -> Vec<f64> {
        // u(y + t) = 1 - (y + t)^d
        let d_us = d as usize;
        let mut u = vec![0.0; n + 1];
        let mut binom = 1.0;
        for (k, uk) in u.iter_mut().enumerate().take(d_us.min(n) + 1) {
            if k > 0 {
                binom = binom * (d_us + 1 - k) as f64 / k as f64;
            }
            *uk = -binom * y.powi((d_us - k) as i32);
        }
        u[0] += 1.0;
        jet::pow(&u, 1.0 / d as f64)
    }
}

impl SmoothFn for Curve {
    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn max_order(&self) -> usize {
        self.deriv_order_max()
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        match &self.kind {
            CurveKind::Polynomial(p) => p.derivative_f64(order, x),
            CurveKind::Cosine => match order % 4 {
                0 => x.cos(),
                1 => -x.sin(),
                2 => -x.cos(),
                _ => x.sin(),
            },
            _ => self.derivatives(x, order)[order],
        }
    }

    fn value(&self, x: f64) -> f64 {
        match &self.kind {
            CurveKind::Polynomial(p) => p.derivative_f64(0, x),
            CurveKind::Cosine => x.cos(),
            CurveKind::ExpPoly(p) => p.derivative_f64(0, x).exp(),
            CurveKind::Fermat { d } => {
                let u = 1.0 - x.powi(*d as i32);
                if *d == 3 {
                    u.cbrt()
                } else {
                    u.powf(1.0 / *d as f64)
                }
            }
        }
    }

    fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        match &self.kind {
            CurveKind::Polynomial(_) | CurveKind::Cosine => {
                (0..=n).map(|k| self.derivative(k, x)).collect()
            }
            CurveKind::ExpPoly(p) => {
                let h = jet::poly_shift(p.derivative_coeffs_f64(0), x, n);
                jet::to_derivatives(jet::exp(&h))
            }
            CurveKind::Fermat { d } => jet::to_derivatives(Curve::fermat_jet(*d, x, n)),
        }
    }
}

/// Smallest `d >= 2` with `f^(k)(a0) = 0` for `1 <= k < d` and
/// `f^(d)(a0) != 0`. Polynomials use an exact zero test at the binary value
/// of `a0`; analytic kinds compare against `tol`.
pub fn classify_type(curve: &Curve, a0: f64, tol: f64) -> Result<Option<usize>> {
    let (lo, hi) = curve.domain();
    if !(a0 > lo && a0 < hi) {
        return Err(Error::OutsideDomain { x: a0, lo, hi });
    }
    let max = curve.deriv_order_max();
    if let CurveKind::Polynomial(p) = curve.kind() {
        let x = BigRational::from_float(a0).expect("finite");
        return Ok(classify_exact(p, &x, max));
    }
    let ders = curve.derivatives(a0, max);
    if ders[1].abs() > tol {
        return Ok(None);
    }
    Ok((2..=max).find(|&k| ders[k].abs() > tol))
}

/// [`classify_type`] for a polynomial at an exact rational point.
pub fn classify_type_exact(curve: &Curve, a0: &BigRational) -> Result<Option<usize>> {
    let p = curve.polynomial_ref().ok_or(Error::NotPolynomial)?;
    Ok(classify_exact(p, a0, curve.deriv_order_max()))
}

fn classify_exact(p: &Polynomial, x: &BigRational, max: usize) -> Option<usize> {
    if !p.derivative_exact(1, x).is_zero() {
        return None;
    }
    (2..=max.min(p.degree())).find(|&k| p.derivative_exact(k, x).abs().is_positive())
}
