use serde::Serialize;

use crate::counting::CountRow;
use crate::error::{Error, Result};

pub const MIN_FIT_ROWS: usize = 4;

/// Which variable the log-log fit runs along; the other is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitAxis {
    #[serde(rename = "slope_in_Q")]
    Q,
    #[serde(rename = "slope_in_delta")]
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub mode: FitAxis,
    /// Value of the held variable.
    pub fixed: f64,
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
    pub n: usize,
    /// Smallest and largest fitted abscissa, before taking logs.
    pub range: (f64, f64),
    pub notes: Vec<String>,
}

/// Least squares `log y = slope log x + intercept`; returns
/// `(slope, intercept, rms)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("x and y lengths differ".into()));
    }
    if xs.len() < MIN_FIT_ROWS {
        return Err(Error::InsufficientRows {
            needed: MIN_FIT_ROWS,
            found: xs.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok((slope, intercept, (sse / n).sqrt()))
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Fits `log N` against `log Q` (rows with `delta = fixed`) or `log delta`
/// (rows with `Q = fixed`). Rows with `N = 0` or ambiguous points are left
/// out and noted.
pub fn fit_exponents(rows: &[CountRow], axis: FitAxis, fixed: f64) -> Result<FitReport> {
    let mut notes = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in rows {
        let (x, held) = match axis {
            FitAxis::Q => (r.q as f64, r.delta.as_f64()),
            FitAxis::Delta => (r.delta.as_f64(), r.q as f64),
        };
        if !same(held, fixed) {
            continue;
        }
        if r.n == 0 {
            notes.push(format!("excluded Q={} delta={}: N = 0", r.q, r.delta));
        } else if r.ambiguous > 0 {
            notes.push(format!(
                "excluded Q={} delta={}: {} ambiguous points",
                r.q, r.delta, r.ambiguous
            ));
        } else {
            xs.push(x);
            ys.push(r.n as f64);
        }
    }
    let (slope, intercept, rms) = fit_power_law(&xs, &ys)?;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitReport {
        mode: axis,
        fixed,
        slope,
        intercept,
        rms,
        n: xs.len(),
        range: (lo, hi),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Method;
    use crate::rational::Delta;

    fn row(q: u64, delta: f64, n: u64, ambiguous: u64) -> CountRow {
        CountRow {
            curve_id: "synthetic".into(),
            q,
            delta: Delta::Real(delta),
            n,
            main_term: 0.0,
            residual: 0.0,
            ambiguous,
            method: Method::Fast,
            elapsed_ms: 0.0,
        }
    }

    #[test]
    fn exact_power_law_slopes() {
        let qs = [500u64, 1000, 2000, 4000];
        let ds = [0.05, 0.1, 0.2, 0.4];
        let mut rows = Vec::new();
        for &q in &qs {
            for &d in &ds {
                rows.push(row(q, d, (d * (q * q) as f64).round() as u64, 0));
            }
        }
        let fq = fit_exponents(&rows, FitAxis::Q, 0.1).unwrap();
        assert!((fq.slope - 2.0).abs() < 1e-9);
        assert_eq!(fq.range, (500.0, 4000.0));
        let fd = fit_exponents(&rows, FitAxis::Delta, 1000.0).unwrap();
        assert!((fd.slope - 1.0).abs() < 1e-9);
        assert!(fd.rms < 1e-9);
    }

    #[test]
    fn linear_perturbation_lowers_slope() {
        let rows: Vec<_> = [500u64, 1000, 2000, 4000]
            .iter()
            .map(|&q| row(q, 0.25, (0.25 * (q * q) as f64) as u64 + q, 0))
            .collect();
        let f = fit_exponents(&rows, FitAxis::Q, 0.25).unwrap();
        assert!(f.slope > 1.95 && f.slope < 2.0, "{}", f.slope);
    }

    #[test]
    fn excluded_rows_are_noted() {
        let mut rows: Vec<_> = [10u64, 20, 40, 80]
            .iter()
            .map(|&q| row(q, 0.25, q * q, 0))
            .collect();
        rows.push(row(5, 0.25, 0, 0));
        rows.push(row(160, 0.25, 160 * 160, 3));
        let f = fit_exponents(&rows, FitAxis::Q, 0.25).unwrap();
        assert_eq!(f.n, 4);
        assert_eq!(f.notes.len(), 2);
        assert_eq!(f.range, (10.0, 80.0));
        rows.truncate(3);
        assert!(matches!(
            fit_exponents(&rows, FitAxis::Q, 0.25),
            Err(Error::InsufficientRows { needed: 4, found: 3 })
        ));
    }
}
