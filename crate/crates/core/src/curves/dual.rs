//! Legendre-type dual `f*(y) = y x(y) - f(x(y))` with `x(y) = (f')^{-1}(y)`.

use crate::curves::SmoothFn;
use crate::error::{Error, Result};

const GRID: usize = 1000;

/// Dual of `base` restricted to a subinterval where `f''` keeps a strict
/// sign. The dual is itself a [`SmoothFn`] on the slope interval `J`, so it
/// can be dualized again.
#[derive(Debug, Clone)]
pub struct DualCurve<F> {
    base: F,
    lo: f64,
    hi: f64,
    slope_lo: f64,
    slope_hi: f64,
    convexity: i8,
}

impl<F: SmoothFn> DualCurve<F> {
    pub fn new(base: F, lo: f64, hi: f64) -> Result<Self> {
        let (dlo, dhi) = base.domain();
        if !(lo < hi && lo >= dlo && hi <= dhi) {
            return Err(Error::InvalidArgument(format!(
                "dual subinterval [{lo}, {hi}] must be nonempty and inside [{dlo}, {dhi}]"
            )));
        }
        let sign = base.derivative(2, lo).signum();
        let step = (hi - lo) / GRID as f64;
        for i in 0..=GRID {
            let x = if i == GRID { hi } else { lo + step * i as f64 };
            let f2 = base.derivative(2, x);
            if f2 == 0.0 || f2.signum() != sign {
                return Err(Error::NotInvertible(x));
            }
        }
        let (a, b) = (base.derivative(1, lo), base.derivative(1, hi));
        Ok(DualCurve {
            base,
            lo,
            hi,
            slope_lo: a.min(b),
            slope_hi: a.max(b),
            convexity: sign as i8,
        })
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn base_interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `J = [inf f', sup f']` over the base subinterval.
    pub fn slope_interval(&self) -> (f64, f64) {
        (self.slope_lo, self.slope_hi)
    }

    /// `+1` for convex, `-1` for concave.
    pub fn convexity(&self) -> i8 {
        self.convexity
    }

    /// `x` with `|f'(x) - y| <= tol`, by Newton steps safeguarded with
    /// bisection. With `tol = 0` the bracket is shrunk to adjacent floats.
    pub fn invert_fprime(&self, y: f64, tol: f64) -> Result<f64> {
        let slack = 1e-12 * y.abs().max(1.0);
        if !(y >= self.slope_lo - slack && y <= self.slope_hi + slack) {
            return Err(Error::OutsideSlopeInterval {
                y,
                lo: self.slope_lo,
                hi: self.slope_hi,
            });
        }
        Ok(self.solve(y, tol))
    }

    fn solve(&self, y: f64, tol: f64) -> f64 {
        let increasing = self.convexity > 0;
        // g(x) = f'(x) - y is monotone; keep a <= root <= b.
        let (mut a, mut b) = (self.lo, self.hi);
        let g = |x: f64| self.base.derivative(1, x) - y;
        let (ga, gb) = (g(a), g(b));
        if (ga >= 0.0) == increasing {
            return a;
        }
        if (gb <= 0.0) == increasing {
            return b;
        }
        let mut x = a + (b - a) * (ga / (ga - gb));
        for _ in 0..200 {
            let gx = g(x);
            if gx.abs() <= tol || gx == 0.0 {
                return x;
            }
            if (gx < 0.0) == increasing {
                a = x;
            } else {
                b = x;
            }
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let newton = x - gx / self.base.derivative(2, x);
            x = if newton > a && newton < b && newton.is_finite() {
                newton
            } else {
                mid
            };
        }
        let (ga, gb) = (g(a).abs(), g(b).abs());
        if ga <= gb {
            a
        } else {
            b
        }
    }

    /// `f*(y)`.
    pub fn dual_eval(&self, y: f64) -> Result<f64> {
        let x = self.invert_fprime(y, 0.0)?;
        Ok(y * x - self.base.value(x))
    }

    fn clamp(&self, y: f64) -> f64 {
        y.clamp(self.slope_lo, self.slope_hi)
    }
}

impl<F: SmoothFn> SmoothFn for DualCurve<F> {
    fn domain(&self) -> (f64, f64) {
        (self.slope_lo, self.slope_hi)
    }

    fn max_order(&self) -> usize {
        3.min(self.base.max_order())
    }

    fn derivative(&self, order: usize, y: f64) -> f64 {
        self.derivatives(y, order)[order]
    }

    /// `f*' = x`, `f*'' = 1 / f''(x)`, `f*''' = -f'''(x) / f''(x)^3`.
    fn derivatives(&self, y: f64, n: usize) -> Vec<f64> {
        let y = self.clamp(y);
        let x = self.solve(y, 0.0);
        let base = self.base.derivatives(x, n.clamp(2, 3));
        let mut out = vec![y * x - base[0]];
        if n >= 1 {
            out.push(x);
        }
        if n >= 2 {
            out.push(1.0 / base[2]);
        }
        if n >= 3 {
            out.push(-base[3] / base[2].powi(3));
        }
        out.resize(n + 1, f64::NAN);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Curve;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn invert_examples() {
        let sq = Curve::poly_ints(&[0, 0, 1], -2.0, 2.0).unwrap();
        let dual = DualCurve::new(&sq, 0.1, 2.0).unwrap();
        assert_eq!(dual.invert_fprime(1.0, 0.0).unwrap(), 0.5);
        let cube = Curve::poly_ints(&[0, 0, 0, 1], 0.0, 1.0).unwrap();
        let dual = DualCurve::new(&cube, 0.01, 1.0).unwrap();
        assert!((dual.invert_fprime(3.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_branches() {
        let cos = Curve::cosine(0.0, PI).unwrap();
        let y = -(2f64.sqrt()) / 2.0;
        // f' = -sin is not monotone across pi/2.
        assert!(matches!(
            DualCurve::new(&cos, FRAC_PI_4, 3.0 * FRAC_PI_4),
            Err(Error::NotInvertible(_))
        ));
        let left = DualCurve::new(&cos, 0.1, FRAC_PI_2 - 0.1).unwrap();
        let right = DualCurve::new(&cos, FRAC_PI_2 + 0.1, PI - 0.1).unwrap();
        assert!((left.invert_fprime(y, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-14);
        assert!((right.invert_fprime(y, 0.0).unwrap() - 3.0 * FRAC_PI_4).abs() < 1e-14);
        assert_eq!(left.convexity(), -1);
    }

    #[test]
    fn dual_eval_examples() {
        let sq = Curve::poly_ints(&[0, 0, 1], -2.0, 2.0).unwrap();
        let dual = DualCurve::new(&sq, 0.1, 2.0).unwrap();
        assert_eq!(dual.dual_eval(1.0).unwrap(), 0.25);
        let cube = Curve::poly_ints(&[0, 0, 0, 1], 0.0, 1.0).unwrap();
        let dual = DualCurve::new(&cube, 0.01, 1.0).unwrap();
        assert!((dual.dual_eval(3.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn slope_outside_interval() {
        let sq = Curve::poly_ints(&[0, 0, 1], -2.0, 2.0).unwrap();
        let dual = DualCurve::new(&sq, 0.1, 1.0).unwrap();
        assert_eq!(dual.slope_interval(), (0.2, 2.0));
        assert!(matches!(
            dual.dual_eval(2.5),
            Err(Error::OutsideSlopeInterval { .. })
        ));
    }

    #[test]
    fn dual_derivatives() {
        // f = x^2: f*(y) = y^2/4, f*' = y/2, f*'' = 1/2, f*''' = 0.
        let sq = Curve::poly_ints(&[0, 0, 1], -2.0, 2.0).unwrap();
        let dual = DualCurve::new(&sq, 0.1, 2.0).unwrap();
        let d = dual.derivatives(1.2, 3);
        assert!((d[0] - 0.36).abs() < 1e-15);
        assert!((d[1] - 0.6).abs() < 1e-15);
        assert_eq!(d[2], 0.5);
        assert_eq!(d[3], 0.0);
    }
}
