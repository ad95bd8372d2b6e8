//! Adaptive Gauss-Kronrod (7/15) quadrature for `integral w(x) e(phi(x)) dx`.
//!
//! The range is first cut at zeros of `phi'`, then each monotone piece is cut
//! into about `|delta phi|` panels so that no panel holds more than one
//! oscillation. Panels are then refined globally, worst error first, until
//! the summed error estimate is below tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::e;
use super::kahan::ComplexSum;
use crate::curves::SmoothFn;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_PANELS: usize = 1 << 20;

/// Samples used to locate sign changes of `phi'`.
const ROOT_SCAN: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Absolute tolerance on the summed error estimate.
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tol: DEFAULT_TOL,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

/// A real phase with its derivative.
pub trait Phase: Sync {
    fn phase(&self, x: f64) -> f64;
    fn phase_derivative(&self, x: f64) -> f64;
}

impl<T: SmoothFn + ?Sized> Phase for T {
    fn phase(&self, x: f64) -> f64 {
        self.value(x)
    }
    fn phase_derivative(&self, x: f64) -> f64 {
        self.derivative(1, x)
    }
}

/// A phase given by two closures.
pub struct FnPhase<G, D> {
    pub g: G,
    pub dg: D,
}

impl<G, D> Phase for FnPhase<G, D>
where
    G: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn phase(&self, x: f64) -> f64 {
        (self.g)(x)
    }
    fn phase_derivative(&self, x: f64) -> f64 {
        (self.dg)(x)
    }
}

/// `integral_c^d e(g(x) - j x) dx`.
pub fn oscillatory_integral<P: Phase + ?Sized>(
    phase: &P,
    c: f64,
    d: f64,
    j: f64,
    tol: f64,
) -> Result<Complex64> {
    let cfg = QuadConfig {
        tol,
        ..QuadConfig::default()
    };
    integrate_oscillatory(
        &|_| 1.0,
        &|x| phase.phase(x) - j * x,
        &|x| phase.phase_derivative(x) - j,
        c,
        d,
        &cfg,
    )
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err
            .total_cmp(&o.err)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let center = f(mid);
    let mut kronrod = center * WGK[7];
    let mut gauss = center * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        err: ((kronrod - gauss) * half).norm(),
    }
}

/// Zeros of `dphi` in `(c, d)` located by sign changes on a uniform scan.
fn stationary_points(dphi: &dyn Fn(f64) -> f64, c: f64, d: f64) -> Vec<f64> {
    let step = (d - c) / ROOT_SCAN as f64;
    let mut roots = Vec::new();
    let mut x0 = c;
    let mut f0 = dphi(c);
    for i in 1..=ROOT_SCAN {
        let x1 = if i == ROOT_SCAN { d } else { c + step * i as f64 };
        let f1 = dphi(x1);
        if f1 == 0.0 && i < ROOT_SCAN {
            roots.push(x1);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                let fm = dphi(m);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

/// `integral_c^d amp(x) e(phi(x)) dx` to absolute tolerance `cfg.tol`.
pub fn integrate_oscillatory(
    amp: &(dyn Fn(f64) -> f64 + Sync),
    phi: &(dyn Fn(f64) -> f64 + Sync),
    dphi: &(dyn Fn(f64) -> f64 + Sync),
    c: f64,
    d: f64,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    if !(c.is_finite() && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad range [{c}, {d}]")));
    }
    if c == d {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if c > d {
        return integrate_oscillatory(amp, phi, dphi, d, c, cfg).map(|v| -v);
    }
    let f = |x: f64| e(phi(x)) * amp(x);

    let mut cuts = vec![c];
    cuts.extend(stationary_points(dphi, c, d));
    cuts.push(d);
    let mut heap = BinaryHeap::new();
    let init_cap = (cfg.max_panels / 4).max(1);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let turns = (phi(b) - phi(a)).abs().ceil();
        let n = (turns as usize).clamp(1, init_cap);
        let h = (b - a) / n as f64;
        for i in 0..n {
            let pa = a + h * i as f64;
            let pb = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
            heap.push(gauss_kronrod(&f, pa, pb));
        }
    }

    let mut frozen = Vec::new();
    let mut total: f64 = heap.iter().map(|p| p.err).sum();
    let mut iterations = 0usize;
    while total > cfg.tol {
        iterations += 1;
        if iterations.is_multiple_of(1024) {
            total = heap.iter().chain(frozen.iter()).map(|p| p.err).sum();
            if total <= cfg.tol {
                break;
            }
        }
        if heap.len() + frozen.len() >= cfg.max_panels {
            return Err(Error::QuadratureBudget {
                tol: cfg.tol,
                panels: cfg.max_panels,
                estimate: total,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureBudget {
                tol: cfg.tol,
                panels: frozen.len(),
                estimate: total,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        let (l, r) = (gauss_kronrod(&f, worst.a, mid), gauss_kronrod(&f, mid, worst.b));
        total += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(panels.iter().map(|p| p.value).collect::<ComplexSum>().value())
}
