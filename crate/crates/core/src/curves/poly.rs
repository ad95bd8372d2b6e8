//! Polynomials with exact rational coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, Signed, Zero};

use crate::rational::{to_big, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
    /// `derivs[n]` holds the coefficients of the n-th derivative as floats.
    derivs: Vec<Vec<f64>>,
}

impl Polynomial {
    /// Coefficients in increasing degree order: `c0 + c1 x + ... + cn x^n`.
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        let mut derivs = Vec::with_capacity(coeffs.len());
        let mut current: Vec<BigRational> = coeffs.iter().map(to_big).collect();
        loop {
            derivs.push(current.iter().map(crate::rational::big_to_f64).collect());
            if current.len() <= 1 {
                break;
            }
            current = differentiate(&current);
        }
        Polynomial { coeffs, derivs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Rational::from_integer(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Float evaluation of the `order`-th derivative by Horner's rule.
    pub fn derivative_f64(&self, order: usize, x: f64) -> f64 {
        match self.derivs.get(order) {
            Some(c) => horner(c, x),
            None => 0.0,
        }
    }

    pub fn derivative_coeffs_f64(&self, order: usize) -> &[f64] {
        self.derivs.get(order).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Exact value of the `order`-th derivative at a rational point.
    pub fn derivative_exact(&self, order: usize, x: &BigRational) -> BigRational {
        let mut c: Vec<BigRational> = self.coeffs.iter().map(to_big).collect();
        for _ in 0..order {
            if c.len() <= 1 {
                return BigRational::zero();
            }
            c = differentiate(&c);
        }
        c.iter()
            .rev()
            .fold(BigRational::zero(), |acc, ci| acc * x + ci)
    }

    pub fn negated(&self) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// `p(-x)`.
    pub fn reflected(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { *c })
                .collect(),
        )
    }

    /// Points in the open interval `(lo, hi)` where the derivative changes sign.
    pub fn turning_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        sign_change_roots(self.derivative_coeffs_f64(1), lo, hi)
    }

    pub fn scaled(&self) -> ScaledPoly {
        ScaledPoly::new(self)
    }
}

fn differentiate(c: &[BigRational]) -> Vec<BigRational> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| ck * BigRational::from_integer(BigInt::from(k)))
        .collect()
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Sign-change roots of a float polynomial inside `(lo, hi)`, by recursive
/// isolation between the turning points of the polynomial.
pub(crate) fn sign_change_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        return if r > lo && r < hi { vec![r] } else { Vec::new() };
    }
    let deriv: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, ck)| ck * k as f64)
        .collect();
    let mut breaks = vec![lo];
    breaks.extend(sign_change_roots(&deriv, lo, hi));
    breaks.push(hi);
    let mut roots = Vec::new();
    for w in breaks.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner(&c, a), horner(&c, b));
        if fa * fb >= 0.0 {
            continue;
        }
        let rising = fb > fa;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (horner(&c, m) < 0.0) == rising {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// Integer form of `q * p(a/q)`: with `L` the lcm of coefficient denominators
/// and `n = max(deg, 1)`, the value equals `N / D` where
/// `N = sum_k (c_k L) a^k q^(n-k)` and `D = L q^(n-1)`.
#[derive(Debug, Clone)]
pub struct ScaledPoly {
    numers: Vec<i128>,
    lcm: i128,
    n: usize,
}

impl ScaledPoly {
    fn new(p: &Polynomial) -> Self {
        let lcm = p
            .coeffs
            .iter()
            .fold(1i128, |acc, c| acc.lcm(&(*c.denom() as i128)));
        let numers = p
            .coeffs
            .iter()
            .map(|c| *c.numer() as i128 * (lcm / *c.denom() as i128))
            .collect();
        ScaledPoly {
            numers,
            lcm,
            n: p.degree().max(1),
        }
    }

    /// Precomputes the q-dependent coefficients `c_k L q^(n-k)` and `D`.
    pub fn for_q<T>(&self, q: u64) -> Option<ScaledAtQ<T>>
    where
        T: Clone + Integer + CheckedMul + CheckedAdd + FromPrimitive,
    {
        let q_t = T::from_u64(q)?;
        let deg = self.numers.len() - 1;
        let mut q_pow = T::one();
        for _ in deg..self.n {
            q_pow = q_pow.checked_mul(&q_t)?;
        }
        // Highest degree first: coefficient of a^(deg-i) is c_(deg-i) q^(n-deg+i).
        let mut terms = Vec::with_capacity(deg + 1);
        for c in self.numers.iter().rev() {
            terms.push(T::from_i128(*c)?.checked_mul(&q_pow)?);
            q_pow = q_pow.checked_mul(&q_t)?;
        }
        let mut den = T::from_i128(self.lcm)?;
        for _ in 1..self.n {
            den = den.checked_mul(&q_t)?;
        }
        Some(ScaledAtQ { terms, den })
    }

    /// `(N, D)` in the integer type `T`; `None` on overflow.
    pub fn scaled_value<T>(&self, a: i64, q: u64) -> Option<(T, T)>
    where
        T: Clone + Integer + CheckedMul + CheckedAdd + FromPrimitive,
    {
        let at_q = self.for_q::<T>(q)?;
        Some((at_q.numerator(a)?, at_q.den))
    }
}

/// `q p(a/q) = numerator(a) / den` for one fixed `q`.
#[derive(Debug, Clone)]
pub struct ScaledAtQ<T> {
    terms: Vec<T>,
    pub den: T,
}

impl<T> ScaledAtQ<T>
where
    T: Clone + Integer + CheckedMul + CheckedAdd + FromPrimitive,
{
    pub fn numerator(&self, a: i64) -> Option<T> {
        let a_t = T::from_i64(a)?;
        let mut acc = T::zero();
        for t in &self.terms {
            acc = acc.checked_mul(&a_t)?.checked_add(t)?;
        }
        Some(acc)
    }
}

/// Distance from `num/den` to the nearest integer, as the numerator over `den`.
pub(crate) fn nearest_int_gap<T>(num: &T, den: &T) -> T
where
    T: Clone + Integer,
{
    let r = num.mod_floor(den);
    let other = den.clone() - r.clone();
    if r < other {
        r
    } else {
        other
    }
}

/// Exact `|| num/den || < r/s` with `s > 0`, `den > 0`.
pub(crate) fn gap_below<T>(num: &T, den: &T, r: &T, s: &T) -> Option<bool>
where
    T: Clone + Integer + CheckedMul,
{
    let gap = nearest_int_gap(num, den);
    Some(gap.checked_mul(s)? < r.checked_mul(den)?)
}

/// Exact `|| q p(a/q) ||` compared against an exact rational delta, in BigInt.
pub(crate) fn exact_gap_below(sp: &ScaledPoly, a: i64, q: u64, delta: &BigRational) -> bool {
    let (n, d): (BigInt, BigInt) = sp.scaled_value(a, q).expect("BigInt never overflows");
    let (r, s) = (delta.numer().clone(), delta.denom().clone());
    debug_assert!(s.is_positive());
    gap_below(&n, &d, &r, &s).expect("BigInt never overflows")
}

pub(crate) fn is_integer_value<T>(num: &T, den: &T) -> bool
where
    T: Clone + Integer,
{
    num.mod_floor(den).is_zero()
}
