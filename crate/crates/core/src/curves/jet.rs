//! Truncated Taylor series ("jets") at a point. A jet `t` of length `n + 1`
//! stores `t[k] = g^(k)(x) / k!`.

/// Taylor coefficients of a float polynomial around `x`, up to order `n`.
pub fn poly_shift(coeffs: &[f64], x: f64, n: usize) -> Vec<f64> {
    let mut work = coeffs.to_vec();
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        if work.is_empty() {
            out.push(0.0);
            continue;
        }
        // Synthetic division by (t - x): remainder is the next coefficient.
        let mut carry = 0.0;
        let mut quotient = vec![0.0; work.len().saturating_sub(1)];
        for i in (0..work.len()).rev() {
            carry = carry * x + work[i];
            if i > 0 {
                quotient[i - 1] = carry;
            }
        }
        out.push(carry);
        work = quotient;
    }
    out
}

/// Jet of `exp(h)` from the jet of `h`.
pub fn exp(h: &[f64]) -> Vec<f64> {
    let mut g = Vec::with_capacity(h.len());
    g.push(h[0].exp());
    for n in 1..h.len() {
        let s: f64 = (1..=n).map(|k| k as f64 * h[k] * g[n - k]).sum();
        g.push(s / n as f64);
    }
    g
}

/// Jet of `u^alpha` from the jet of `u`, assuming `u[0] > 0`.
pub fn pow(u: &[f64], alpha: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(u.len());
    g.push(u[0].powf(alpha));
    for n in 1..u.len() {
        let s: f64 = (1..=n)
            .map(|k| (alpha * k as f64 - (n - k) as f64) * u[k] * g[n - k])
            .sum();
        g.push(s / (n as f64 * u[0]));
    }
    g
}

/// Converts a jet to derivative values `g^(k)(x)`.
pub fn to_derivatives(mut t: Vec<f64>) -> Vec<f64> {
    let mut fact = 1.0;
    for (k, v) in t.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *v *= fact;
    }
    t
}
