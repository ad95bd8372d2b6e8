use nearcurve::counting::{
    count_exact_poly, count_fast, count_fast_with, count_naive, on_curve_count, CountQuery, FastConfig,
};
use nearcurve::curves::{Curve, Polynomial};
use nearcurve::rational::{Delta, Interval, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
}

fn poly() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), 3..=5)
}

fn interval() -> impl Strategy<Value = Interval> {
    (-8i64..=8, 0i64..=8).prop_map(|(a, w)| Interval {
        lo: Rational::new(a, 8),
        hi: Rational::new((a + w).min(8), 8),
    })
}

/// `p/q` strictly inside `(0, 1/2)`.
fn delta() -> impl Strategy<Value = Delta> {
    (3i64..=24).prop_flat_map(|q| (1i64..=(q - 1) / 2, Just(q))).prop_map(|(p, q)| Delta::rational(p, q))
}

fn curve(c: &[Rational]) -> Curve {
    Curve::polynomial(Polynomial::new(c.to_vec()), -2.0, 2.0).unwrap()
}

fn n_exact(c: &Curve, q: u64, d: Delta, i: Interval) -> u64 {
    count_exact_poly(c, &CountQuery::new(q, d, i).unwrap()).unwrap().n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn methods_agree(c in poly(), i in interval(), q in 1u64..60, d in delta()) {
        let f = curve(&c);
        let query = CountQuery::new(q, d, i).unwrap();
        let exact = count_exact_poly(&f, &query).unwrap();
        let naive = count_naive(&f, &query).unwrap();
        let fast = count_fast(&f, &query).unwrap();
        let forced = count_fast_with(&f, &query, &FastConfig { force_inversion: true }).unwrap();
        prop_assert_eq!(exact.ambiguous, 0);
        prop_assert_eq!(naive.n, exact.n);
        prop_assert_eq!(fast.n, exact.n);
        prop_assert_eq!(forced.n, exact.n);
    }

    #[test]
    fn float_delta_methods_agree(c in poly(), i in interval(), q in 1u64..60, d in 0.01f64..0.49) {
        let f = curve(&c);
        let query = CountQuery::new(q, Delta::Real(d), i).unwrap();
        let exact = count_exact_poly(&f, &CountQuery::new(q, Delta::Real(d), i).unwrap());
        prop_assert!(exact.is_err());
        let naive = count_naive(&f, &query).unwrap();
        let fast = count_fast(&f, &query).unwrap();
        prop_assert_eq!((naive.n, naive.ambiguous), (fast.n, fast.ambiguous));
        prop_assert_eq!(naive.ambiguous, 0);
    }

    #[test]
    fn monotone_in_q_and_delta(c in poly(), i in interval(), q in 1u64..50, d1 in delta(), d2 in delta()) {
        let f = curve(&c);
        let (lo, hi) = if d1.as_f64() <= d2.as_f64() { (d1, d2) } else { (d2, d1) };
        prop_assert!(n_exact(&f, q, lo, i) <= n_exact(&f, q, hi, i));
        prop_assert!(n_exact(&f, q, lo, i) <= n_exact(&f, q + 1, lo, i));
    }

    #[test]
    fn bounded_by_pairs_and_on_curve_points(c in poly(), i in interval(), q in 1u64..50, d in delta()) {
        let f = curve(&c);
        let query = CountQuery::new(q, d, i).unwrap();
        let n = n_exact(&f, q, d, i);
        prop_assert!(n <= query.total_pairs());
        prop_assert!(n >= on_curve_count(&f, &i, q).unwrap());
    }

    #[test]
    fn integer_affine_shift_invariant(c in poly(), i in interval(), q in 1u64..50, d in delta(),
                                      m in -3i64..=3, k in -3i64..=3) {
        let mut shifted = c.clone();
        shifted[0] += Rational::from_integer(k);
        shifted[1] += Rational::from_integer(m);
        prop_assert_eq!(n_exact(&curve(&c), q, d, i), n_exact(&curve(&shifted), q, d, i));
    }

    #[test]
    fn reflection_invariant(c in poly(), i in interval(), q in 1u64..50, d in delta()) {
        let f = curve(&c);
        let reflected = f.reflected_poly().unwrap();
        prop_assert_eq!(n_exact(&f, q, d, i), n_exact(&reflected, q, d, i.negated()));
        let negated = f.negated_poly().unwrap();
        prop_assert_eq!(n_exact(&f, q, d, i), n_exact(&negated, q, d, i));
    }
}

#[test]
fn analytic_methods_agree_without_ambiguity() {
    for (text, range) in [("cos", "-1,1"), ("exp:0,0,-1", "-1,1"), ("fermat:3", "0,9/10")] {
        let i: Interval = range.parse().unwrap();
        let f = Curve::parse(text, Some(i)).unwrap();
        for q in [1u64, 17, 90] {
            for d in [0.05, 0.1, 0.25, 0.4] {
                let query = CountQuery::new(q, Delta::Real(d), i).unwrap();
                let naive = count_naive(&f, &query).unwrap();
                let fast = count_fast(&f, &query).unwrap();
                assert_eq!((naive.n, naive.ambiguous), (fast.n, fast.ambiguous), "{text} Q={q} delta={d}");
            }
        }
    }
}

#[test]
fn thread_count_does_not_change_counts() {
    let f = Curve::poly_ints(&[0, 0, 0, 1], -1.0, 1.0).unwrap();
    let query = CountQuery::new(400, Delta::Real(0.1), Interval::from_ints(-1, 1)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| count_fast(&f, &query).unwrap().n)
    };
    assert_eq!(run(1), run(4));
}
