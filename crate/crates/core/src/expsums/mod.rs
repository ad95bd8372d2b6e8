//! The sequence `{q f(a/q)}`, its discrepancy and Erdős-Turán bound,
//! exponential sums, oscillatory integrals, and numeric checks of the
//! analytic steps behind the counting asymptotics: truncated Poisson
//! summation, van der Corput decay, stationary phase and dual-curve sums.
//!
//! `e(x) = exp(2 pi i x)` throughout.

mod dual_sums;
mod kahan;
mod estimates;
mod quadrature;
mod sequence;

pub use dual_sums::{
    dual_sums, dual_sums_smooth, write_dual_csv, DualSumQuery, DualSumReport, DualVariant,
    DEFAULT_EPSILON,
};
pub use kahan::ComplexSum;
pub use estimates::{
    poisson_check, stationary_phase_approx, vdc_check, vdc_lambda_grid, PoissonReport,
    StationaryPhaseReport, VdcReport, Window,
};
pub use quadrature::{
    integrate_oscillatory, oscillatory_integral, FnPhase, Phase, QuadConfig, DEFAULT_MAX_PANELS,
    DEFAULT_TOL,
};
pub use sequence::{
    discrepancy, discrepancy_record, erdos_turan_bound, et_coefficient, exp_sum,
    sequence_points, DiscrepancyRecord, SeqEntry, SequencePoints,
};

use num_complex::Complex64;

/// `e(x) = exp(2 pi i x)`, reducing `x` mod 1 first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let r = x - x.round();
    let (s, c) = (std::f64::consts::TAU * r).sin_cos();
    Complex64::new(c, s)
}
