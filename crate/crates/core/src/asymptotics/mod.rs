//! Grid experiments against the main term `|I| delta Q^2` and the error
//! shape, exponent fits, and the two sharpness constructions.

mod fit;
mod plot;
mod scan;
mod sharpness;

pub use fit::{fit_exponents, fit_power_law, FitAxis, FitReport, MIN_FIT_ROWS};
pub use plot::{emit_plot, PlotSeries};
pub use scan::{
    envelope_constants, scan_grid, EnvelopeReport, ScanError, ScanTable, DEFAULT_DELTAS,
};
pub use sharpness::{
    sharpness_fermat, sharpness_parabola, DeltaRule, FermatRow, FermatSharpness,
    ParabolaSharpness,
};

/// `|I| delta Q^2`.
pub fn main_term(length: f64, q_max: u64, delta: f64) -> f64 {
    length * delta * (q_max as f64).powi(2)
}

/// `delta^(1/2) log(1/delta) Q^(2 - 1/(2(d-1))) + delta^(1/d) Q^(2 - 1/d)
/// + Q^(1 + eps)` with unit constants.
pub fn error_bound(d: u32, q: f64, delta: f64, eps: f64) -> f64 {
    let d = d as f64;
    delta.sqrt() * (1.0 / delta).ln() * q.powf(2.0 - 1.0 / (2.0 * (d - 1.0)))
        + delta.powf(1.0 / d) * q.powf(2.0 - 1.0 / d)
        + q.powf(1.0 + eps)
}

/// Whether `delta > Q^(-1/(d-1) + eps)`, the regime of the asymptotic formula.
pub fn in_regime(d: u32, q: f64, delta: f64, eps: f64) -> bool {
    delta > q.powf(-1.0 / (d as f64 - 1.0) + eps)
}
