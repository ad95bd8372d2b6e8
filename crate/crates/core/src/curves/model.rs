//! Local normal form `f(t) = c0 + c1 (t - a0)^d + R(t)` around a point of
//! finite type, with grid certification of the three model-case hypotheses:
//!
//! * H1: `|f^(d)|` bounded below on `(a0 - eps0, a0 + eps0)`;
//! * H2: `|f^(j)| ~ |h^(j)|` for `j = 1..d` on the outer half-annuli;
//! * H3: `f'` strictly monotone on each half interval.
//!
//! Certification samples a dense grid and is a heuristic, not an enclosure.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::curves::{Curve, SmoothFn};
use crate::error::{Error, Result};
use crate::rational::big_to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelConfig {
    /// Largest `eps0` tried; halved until certification passes.
    pub eps_cap: f64,
    /// Grid points per certified interval.
    pub grid: usize,
    pub max_halvings: u32,
    /// H1 requires `min |f^(d)| >= h1_fraction * |f^(d)(a0)|`.
    pub h1_fraction: f64,
    /// H2 requires `|f^(j)| / |h^(j)|` in `[h2_lower, h2_upper]`.
    pub h2_lower: f64,
    pub h2_upper: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            eps_cap: 0.5,
            grid: 10_000,
            max_halvings: 40,
            h1_fraction: 0.5,
            h2_lower: 0.25,
            h2_upper: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Report {
    pub pass: bool,
    /// Smallest `|f^(d)|` on the grid.
    pub grid_min: f64,
    /// `(h/2) max |f^(d+1)|`, subtracted from `grid_min` to cover gaps.
    pub slack: f64,
    pub margin: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H2Report {
    pub pass: bool,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H3Report {
    pub pass: bool,
    pub left: Monotonicity,
    pub right: Monotonicity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub h1: H1Report,
    pub h2: H2Report,
    pub h3: H3Report,
}

impl CertificationReport {
    pub fn all_pass(&self) -> bool {
        self.h1.pass && self.h2.pass && self.h3.pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelCase {
    pub a0: f64,
    pub d: usize,
    pub c0: f64,
    pub c1: f64,
    pub eps0: f64,
    /// Monotonicity of `f'` on `(a0 - eps0, a0)` and `(a0, a0 + eps0)`.
    pub orientation: (Monotonicity, Monotonicity),
    pub certified_h1: bool,
    pub certified_h2: bool,
    pub certified_h3: bool,
    /// Always true: certification is grid-based.
    pub grid_certified: bool,
    /// `max |f^(d+1)| / (d+1)!` on the certified interval.
    pub remainder_bound: f64,
    pub report: CertificationReport,
}

impl ModelCase {
    /// `h(t) = c0 + c1 (t - a0)^d`.
    pub fn h(&self, t: f64) -> f64 {
        self.c0 + self.c1 * (t - self.a0).powi(self.d as i32)
    }

    pub fn h_derivative(&self, j: usize, t: f64) -> f64 {
        if j == 0 {
            return self.h(t);
        }
        model_derivative(self.c1, self.d, j, t - self.a0)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a0 - self.eps0, self.a0 + self.eps0)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn model_derivative(c1: f64, d: usize, j: usize, s: f64) -> f64 {
    if j > d {
        return 0.0;
    }
    c1 * factorial(d) / factorial(d - j) * s.powi((d - j) as i32)
}

/// Derivatives near `a0`. Polynomials are re-expanded exactly in powers of
/// `s = t - a0`, so values close to `a0` carry no cancellation error.
enum Local<'a> {
    Taylor { a0: f64, b: Vec<f64> },
    Direct(&'a Curve),
}

impl<'a> Local<'a> {
    fn new(curve: &'a Curve, a0: f64) -> Self {
        match curve.polynomial_ref() {
            Some(p) => {
                let x = BigRational::from_float(a0).expect("finite a0");
                let mut fact = BigInt::from(1);
                let b = (0..=p.degree())
                    .map(|k| {
                        if k > 1 {
                            fact *= k;
                        }
                        big_to_f64(&(p.derivative_exact(k, &x) / BigRational::from_integer(fact.clone())))
                    })
                    .collect();
                Local::Taylor { a0, b }
            }
            None => Local::Direct(curve),
        }
    }

    /// `f^(j)(t)` for `j = 0..=n`.
    fn derivatives(&self, t: f64, n: usize) -> Vec<f64> {
        match self {
            Local::Direct(c) => c.derivatives(t, n),
            Local::Taylor { a0, b } => {
                let s = t - a0;
                (0..=n)
                    .map(|j| {
                        (j..b.len()).rev().fold(0.0, |acc, k| {
                            acc * s + b[k] * factorial(k) / factorial(k - j)
                        })
                    })
                    .collect()
            }
        }
    }

    fn derivative(&self, j: usize, t: f64) -> f64 {
        self.derivatives(t, j)[j]
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / n as f64;
    (0..=n).map(move |i| if i == n { hi } else { lo + step * i as f64 })
}

fn monotonicity(signs: impl Iterator<Item = f64>) -> Monotonicity {
    let (mut pos, mut neg, mut zero) = (false, false, false);
    for s in signs {
        if s > 0.0 {
            pos = true;
        } else if s < 0.0 {
            neg = true;
        } else {
            zero = true;
        }
    }
    match (pos, neg, zero) {
        (true, false, false) => Monotonicity::Increasing,
        (false, true, false) => Monotonicity::Decreasing,
        _ => Monotonicity::Neither,
    }
}

fn certify(
    curve: &Local<'_>,
    a0: f64,
    d: usize,
    c1: f64,
    eps0: f64,
    cfg: &ModelConfig,
) -> (CertificationReport, f64) {
    let n = cfg.grid;
    let (lo, hi) = (a0 - eps0, a0 + eps0);
    let anchor = curve.derivative(d, a0).abs();

    // H1 with a Lipschitz slack for the gaps between grid points.
    let mut grid_min = f64::INFINITY;
    let mut next_max: f64 = 0.0;
    for t in grid(lo, hi, n) {
        let ders = curve.derivatives(t, d + 1);
        grid_min = grid_min.min(ders[d].abs());
        next_max = next_max.max(ders[d + 1].abs());
    }
    let slack = 0.5 * (hi - lo) / n as f64 * next_max;
    let threshold = cfg.h1_fraction * anchor;
    let margin = grid_min - slack;
    let h1 = H1Report {
        pass: anchor > 0.0 && margin >= threshold,
        grid_min,
        slack,
        margin,
        threshold,
    };

    // H2 on the outer half-annuli.
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for (a, b) in [(lo, a0 - 0.5 * eps0), (a0 + 0.5 * eps0, hi)] {
        for t in grid(a, b, n) {
            let ders = curve.derivatives(t, d);
            for (j, fj) in ders.iter().enumerate().skip(1) {
                let hj = model_derivative(c1, d, j, t - a0).abs();
                let r = fj.abs() / hj;
                min_ratio = min_ratio.min(r);
                max_ratio = max_ratio.max(r);
            }
        }
    }
    let h2 = H2Report {
        pass: min_ratio >= cfg.h2_lower && max_ratio <= cfg.h2_upper,
        min_ratio,
        max_ratio,
        lower: cfg.h2_lower,
        upper: cfg.h2_upper,
    };

    // H3: f'' keeps a strict sign on each open half.
    let step = eps0 / n as f64;
    let left = monotonicity((0..n).map(|i| curve.derivative(2, lo + step * i as f64)));
    let right = monotonicity((1..=n).map(|i| curve.derivative(2, a0 + step * i as f64)));
    let h3 = H3Report {
        pass: left != Monotonicity::Neither && right != Monotonicity::Neither,
        left,
        right,
    };

    let remainder = grid(lo, hi, n)
        .map(|t| curve.derivative(d + 1, t).abs())
        .fold(0.0, f64::max)
        / factorial(d + 1);
    (CertificationReport { h1, h2, h3 }, remainder)
}

/// Grid certification of H1-H3 for an existing model.
pub fn certify_hypotheses(model: &ModelCase, curve: &Curve) -> CertificationReport {
    certify_hypotheses_with(model, curve, &ModelConfig::default())
}

pub fn certify_hypotheses_with(
    model: &ModelCase,
    curve: &Curve,
    cfg: &ModelConfig,
) -> CertificationReport {
    certify(&Local::new(curve, model.a0), model.a0, model.d, model.c1, model.eps0, cfg).0
}

pub fn model_decompose(curve: &Curve, a0: f64, d: usize) -> Result<ModelCase> {
    model_decompose_with(curve, a0, d, &ModelConfig::default())
}

/// Builds the model case at `a0`, halving `eps0` from `cfg.eps_cap` until
/// the interval fits the domain and H1-H3 pass on the grid.
pub fn model_decompose_with(
    curve: &Curve,
    a0: f64,
    d: usize,
    cfg: &ModelConfig,
) -> Result<ModelCase> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("type must be >= 2, got {d}")));
    }
    match super::classify_type(curve, a0, super::DEFAULT_TYPE_TOL)? {
        Some(t) if t == d => {}
        other => {
            return Err(Error::Certification(format!(
                "curve is not of type {d} at {a0} (classified as {other:?})"
            )))
        }
    }
    // Rejects a0 outside the domain and d above the supported order.
    curve.eval_derivative(d, a0)?;
    let local = Local::new(curve, a0);
    let at = local.derivatives(a0, d);
    let (c0, c1) = (at[0], at[d] / factorial(d));
    let (dlo, dhi) = curve.domain();
    let mut eps0 = cfg.eps_cap;
    let mut last_failure = String::from("interval never fit inside the domain");
    for _ in 0..=cfg.max_halvings {
        if a0 - eps0 >= dlo && a0 + eps0 <= dhi {
            let (report, remainder_bound) = certify(&local, a0, d, c1, eps0, cfg);
            if report.all_pass() {
                return Ok(ModelCase {
                    a0,
                    d,
                    c0,
                    c1,
                    eps0,
                    orientation: (report.h3.left, report.h3.right),
                    certified_h1: true,
                    certified_h2: true,
                    certified_h3: true,
                    grid_certified: true,
                    remainder_bound,
                    report,
                });
            }
            last_failure = format!(
                "eps0 = {eps0:e}: H1 {} H2 {} H3 {}",
                report.h1.pass, report.h2.pass, report.h3.pass
            );
        }
        eps0 *= 0.5;
    }
    Err(Error::Certification(last_failure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Polynomial;

    fn with_eps(model: &ModelCase, eps0: f64) -> ModelCase {
        ModelCase {
            eps0,
            ..model.clone()
        }
    }

    #[test]
    fn cubic_model_is_exact() {
        let c = Curve::poly_ints(&[0, 0, 0, 1], -1.0, 1.0).unwrap();
        let m = model_decompose(&c, 0.0, 3).unwrap();
        assert_eq!((m.c0, m.c1, m.remainder_bound), (0.0, 1.0, 0.0));
        assert_eq!(m.eps0, 0.5);
        assert_eq!(m.orientation, (Monotonicity::Decreasing, Monotonicity::Increasing));
        let r = certify_hypotheses(&m, &c);
        assert!(r.h1.pass);
        assert_eq!(r.h1.margin, 6.0);
        assert_eq!(r.h1.threshold, 3.0);
        assert!((r.h2.min_ratio - 1.0).abs() < 1e-12);
        assert!((r.h2.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_model() {
        let c = Curve::cosine(-4.0, 4.0).unwrap();
        let m = model_decompose(&c, 0.0, 2).unwrap();
        assert_eq!(m.c0, 1.0);
        assert_eq!(m.c1, -0.5);
        assert!(m.remainder_bound > 0.0);
        // cos'' vanishes at pi/2 < 3.
        let wide = certify_hypotheses(&with_eps(&m, 3.0), &c);
        assert!(!wide.h1.pass);
        assert!(wide.h1.margin < wide.h1.threshold);
    }

    #[test]
    fn fermat_model() {
        let c = Curve::fermat(3, -0.5, 0.5).unwrap();
        let m = model_decompose(&c, 0.0, 3).unwrap();
        assert!((m.c0 - 1.0).abs() < 1e-15);
        assert!((m.c1 + 1.0 / 3.0).abs() < 1e-14, "{}", m.c1);
        assert!(m.eps0 <= 0.5 && m.eps0 > 0.0);
    }

    #[test]
    fn parabola_h3_passes_for_any_eps() {
        let c = Curve::poly_ints(&[0, 0, 1], -10.0, 10.0).unwrap();
        let m = model_decompose(&c, 0.0, 2).unwrap();
        for eps in [0.01, 0.5, 5.0] {
            let r = certify_hypotheses(&with_eps(&m, eps), &c);
            assert!(r.h3.pass);
            assert_eq!(r.h3.left, Monotonicity::Increasing);
        }
    }

    #[test]
    fn wrong_type_is_rejected() {
        let c = Curve::poly_ints(&[0, 0, 1], -1.0, 1.0).unwrap();
        assert!(matches!(
            model_decompose(&c, 0.0, 3),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn certification_failure_is_explicit() {
        // The domain barely extends left of 0, so no eps0 fits before the
        // halving budget runs out.
        let p = Polynomial::from_ints(&[0, 0, 1]);
        let c = Curve::polynomial(p, -1e-300, 1.0).unwrap();
        let cfg = ModelConfig {
            max_halvings: 5,
            ..ModelConfig::default()
        };
        assert!(matches!(
            model_decompose_with(&c, 0.0, 2, &cfg),
            Err(Error::Certification(_))
        ));
    }
}
