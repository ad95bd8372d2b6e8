use nearcurve::curves::{classify_type, model_decompose, Curve, DualCurve, Polynomial, SmoothFn};
use nearcurve::rational::Rational;
use proptest::prelude::*;

fn max_roundtrip_error(f: &Curve, lo: f64, hi: f64) -> f64 {
    let dual = DualCurve::new(f, lo, hi).unwrap();
    let (slo, shi) = dual.slope_interval();
    let double = DualCurve::new(&dual, slo, shi).unwrap();
    (0..1000)
        .map(|i| lo + (hi - lo) * i as f64 / 999.0)
        .map(|x| (double.dual_eval(x).unwrap() - f.value(x)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn double_dual_is_identity() {
    let x2 = Curve::poly_ints(&[0, 0, 1], -2.0, 2.0).unwrap();
    let x3 = Curve::poly_ints(&[0, 0, 0, 1], -2.0, 2.0).unwrap();
    assert!(max_roundtrip_error(&x2, 0.1, 1.0) <= 1e-8);
    assert!(max_roundtrip_error(&x3, 0.2, 1.0) <= 1e-8);
    let cos = Curve::cosine(-3.0, 3.0).unwrap();
    assert!(max_roundtrip_error(&cos, -1.0, 1.0) <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_equality(a in 0.5f64..4.0, b in -2.0f64..2.0, c in 0.0f64..1.0, x in 0.05f64..0.95) {
        // f = c x^3 + a x^2 + b x is strictly convex on [0, 1]
        let p = Polynomial::new(vec![
            Rational::from_integer(0),
            Rational::approximate_float(b).unwrap(),
            Rational::approximate_float(a).unwrap(),
            Rational::approximate_float(c).unwrap(),
        ]);
        let f = Curve::polynomial(p, -1.0, 2.0).unwrap();
        let dual = DualCurve::new(&f, 0.0, 1.0).unwrap();
        let slope = f.derivative(1, x);
        let young = dual.dual_eval(slope).unwrap() + f.value(x) - x * slope;
        prop_assert!(young.abs() < 1e-12 * (1.0 + slope.abs()), "{}", young);
    }

    #[test]
    fn monomial_model_is_exact(d in 2usize..=6, c1 in 1i64..=5, a0 in -3i64..=3) {
        // f = c1 (x - a0/4)^d expanded with exact binomial coefficients
        let shift = Rational::new(a0, 4);
        let mut coeffs = vec![Rational::from_integer(0); d + 1];
        let mut binom = 1i64;
        for (k, coeff) in coeffs.iter_mut().enumerate() {
            if k > 0 {
                binom = binom * (d + 1 - k) as i64 / k as i64;
            }
            let power = (0..d - k).fold(Rational::from_integer(1), |acc, _| acc * -shift);
            *coeff = Rational::from_integer(c1 * binom) * power;
        }
        let centre = a0 as f64 / 4.0;
        let f = Curve::polynomial(Polynomial::new(coeffs), centre - 1.0, centre + 1.0).unwrap();
        let m = model_decompose(&f, centre, d).unwrap();
        prop_assert_eq!(m.remainder_bound, 0.0);
        for i in 0..=10 {
            let t = centre - m.eps0 + 2.0 * m.eps0 * i as f64 / 10.0;
            prop_assert!((m.h(t) - f.value(t)).abs() <= 1e-12 * (1.0 + f.value(t).abs()));
        }
    }

    #[test]
    fn type_ignores_constants(c0 in -5i64..=5, d in 2usize..=5) {
        let mut base = vec![0i64; d + 1];
        base[d] = 1;
        let f = Curve::poly_ints(&base, -1.0, 1.0).unwrap();
        base[0] = c0;
        let g = Curve::poly_ints(&base, -1.0, 1.0).unwrap();
        prop_assert_eq!(classify_type(&f, 0.0, 1e-12).unwrap(), Some(d));
        prop_assert_eq!(classify_type(&g, 0.0, 1e-12).unwrap(), Some(d));
    }
}
