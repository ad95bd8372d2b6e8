//! Numeric checks of the analytic steps: truncated Poisson summation,
//! van der Corput decay and the stationary-phase approximation.

use num_complex::Complex64;
use serde::Serialize;

use super::e;
use super::kahan::ComplexSum;
use super::quadrature::{integrate_oscillatory, oscillatory_integral, Phase, QuadConfig};
use crate::curves::{DualCurve, SmoothFn};
use crate::error::{Error, Result};

/// Grid points used to check monotonicity of `g'` and the derivative floor.
const SCAN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// `residual / log(2 + t - s)`
    pub normalized: f64,
    /// `g'(c)`
    pub s: f64,
    /// `g'(d)`
    pub t: f64,
    /// Whether `g'` increased strictly across the scan grid.
    pub strictly_increasing: bool,
}

/// Compares `sum_{c <= n <= d} e(g(n))` with
/// `sum_{s-1 <= j <= t+1} integral_c^d e(g(x) - j x) dx` where `s = g'(c)`
/// and `t = g'(d)`. `g'` must be nondecreasing on the scan grid.
pub fn poisson_check<P: Phase + ?Sized>(g: &P, c: f64, d: f64, tol: f64) -> Result<PoissonReport> {
    if !(c < d) {
        return Err(Error::InvalidArgument(format!("empty range [{c}, {d}]")));
    }
    let step = (d - c) / SCAN as f64;
    let mut prev = g.phase_derivative(c);
    let mut strict = true;
    for i in 1..=SCAN {
        let x = if i == SCAN { d } else { c + step * i as f64 };
        let cur = g.phase_derivative(x);
        if cur < prev - 1e-12 * prev.abs().max(1.0) {
            return Err(Error::NotMonotone(format!(
                "g' decreases from {prev} to {cur} near x = {x}"
            )));
        }
        strict &= cur > prev;
        prev = cur;
    }
    let (s, t) = (g.phase_derivative(c), g.phase_derivative(d));
    let lhs = ((c.ceil() as i64)..=(d.floor() as i64))
        .map(|n| e(g.phase(n as f64)))
        .collect::<ComplexSum>()
        .value();
    let mut rhs = ComplexSum::default();
    for j in ((s - 1.0).ceil() as i64)..=((t + 1.0).floor() as i64) {
        rhs.add(oscillatory_integral(g, c, d, j as f64, tol)?);
    }
    let rhs = rhs.value();
    let residual = (lhs - rhs).norm();
    Ok(PoissonReport {
        lhs,
        rhs,
        residual,
        normalized: residual / (2.0 + t - s).ln(),
        s,
        t,
        strictly_increasing: strict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VdcReport {
    pub d: usize,
    /// `(lambda, lambda^(1/d) |integral e(lambda f)|)`
    pub points: Vec<(f64, f64)>,
    pub max: f64,
    /// Smallest `|f^(d)|` seen on the scan grid.
    pub min_derivative: f64,
}

/// Geometric grid `10^1 .. 10^4` with `per_decade` points per decade.
pub fn vdc_lambda_grid(per_decade: usize) -> Vec<f64> {
    let n = 3 * per_decade;
    (0..=n)
        .map(|i| 10f64.powf(1.0 + 3.0 * i as f64 / n as f64))
        .collect()
}

/// `max_lambda lambda^(1/d) |integral_lo^hi e(lambda f(x)) dx|` over
/// `lambdas`, all of which must be `>= 1`. `|f^(d)|` must stay positive on
/// `[lo, hi]`.
pub fn vdc_check<F: SmoothFn + ?Sized>(
    f: &F,
    d: usize,
    lo: f64,
    hi: f64,
    lambdas: &[f64],
    tol: f64,
) -> Result<VdcReport> {
    if lambdas.iter().any(|&l| !(l >= 1.0)) {
        return Err(Error::InvalidArgument("lambda grid requires lambda >= 1".into()));
    }
    let step = (hi - lo) / SCAN as f64;
    let min_derivative = (0..=SCAN)
        .map(|i| f.derivative(d, lo + step * i as f64).abs())
        .fold(f64::INFINITY, f64::min);
    if !(min_derivative > 0.0) {
        return Err(Error::Certification(format!(
            "|f^({d})| is not bounded below on [{lo}, {hi}]"
        )));
    }
    let cfg = QuadConfig {
        tol,
        ..QuadConfig::default()
    };
    let mut points = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let v = integrate_oscillatory(
            &|_| 1.0,
            &|x| l * f.value(x),
            &|x| l * f.derivative(1, x),
            lo,
            hi,
            &cfg,
        )?;
        points.push((l, l.powf(1.0 / d as f64) * v.norm()));
    }
    let max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(VdcReport {
        d,
        points,
        max,
        min_derivative,
    })
}

/// Cutoff applied to the integrand of the exact side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Window {
    /// Indicator of the segment. Endpoint contributions give an `O(1/lambda)`
    /// error.
    Sharp,
    /// Smooth bump equal to 1 on the middle half and vanishing to all orders
    /// at the ends. The error then decays faster than any power.
    SmoothBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPhaseReport {
    pub theta: f64,
    pub approx: Complex64,
    pub exact: Complex64,
    pub err: f64,
}

/// Smooth step from 0 at `t <= 0` to 1 at `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    let s = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (s(t), s(1.0 - t));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

fn bump(lo: f64, hi: f64, x: f64) -> f64 {
    let q = 0.25 * (hi - lo);
    smooth_step((x - lo) / q) * smooth_step((hi - x) / q)
}

/// Compares `lambda^(-1/2) |f''(theta)|^(-1/2) e(-lambda f*(y) + sign(f'')/8)`
/// with `integral w(x) e(lambda (f(x) - y x)) dx` over `[lo, hi]`, where
/// `theta = (f')^(-1)(y)` must lie in the middle half of the segment.
pub fn stationary_phase_approx<F: SmoothFn>(
    f: F,
    lo: f64,
    hi: f64,
    lambda: f64,
    y: f64,
    window: Window,
    tol: f64,
) -> Result<StationaryPhaseReport> {
    let dual = DualCurve::new(f, lo, hi)?;
    let theta = dual.invert_fprime(y, 0.0)?;
    let q = 0.25 * (hi - lo);
    if !(theta >= lo + q && theta <= hi - q) {
        return Err(Error::StationaryPointInTransition { theta, lo, hi });
    }
    let f = dual.base();
    let sigma = dual.convexity() as f64;
    let curvature = f.derivative(2, theta).abs();
    let approx = e(-lambda * dual.dual_eval(y)? + sigma / 8.0) / (lambda * curvature).sqrt();
    let cfg = QuadConfig {
        tol,
        ..QuadConfig::default()
    };
    let phi = |x: f64| lambda * (f.value(x) - y * x);
    let dphi = |x: f64| lambda * (f.derivative(1, x) - y);
    let exact = match window {
        Window::Sharp => integrate_oscillatory(&|_| 1.0, &phi, &dphi, lo, hi, &cfg)?,
        Window::SmoothBump => {
            integrate_oscillatory(&|x| bump(lo, hi, x), &phi, &dphi, lo, hi, &cfg)?
        }
    };
    Ok(StationaryPhaseReport {
        theta,
        approx,
        exact,
        err: (approx - exact).norm(),
    })
}
