use proptest::prelude::*;
use workbench_core::{LogSeries, Rational};

const ORDER: i64 = 7;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::from((n, d)))
}

fn series() -> impl Strategy<Value = LogSeries> {
    prop::collection::vec(rational(), 1..=ORDER as usize).prop_map(|c| LogSeries::from_coeffs(c, ORDER))
}

/// Series in `z^{1/2}` with at most one power of `log z`.
fn ramified() -> impl Strategy<Value = LogSeries> {
    prop::collection::vec((0i64..8, 0u8..=1, rational()), 0..6).prop_map(|terms| {
        LogSeries::from_terms(
            2,
            4,
            terms.into_iter().map(|(m, k, c)| (Rational::from((m, 2)), k, c)),
        )
        .unwrap()
    })
}

fn unit() -> impl Strategy<Value = LogSeries> {
    (series(), 1i64..=5).prop_map(|(s, c0)| s.add(&LogSeries::constant(c0, ORDER).sub(&LogSeries::constant(s.constant_term(), ORDER))))
}

fn no_constant() -> impl Strategy<Value = LogSeries> {
    series().prop_map(|s| s.sub(&LogSeries::constant(s.constant_term(), ORDER)))
}

proptest! {
    #[test]
    fn ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c)).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap())
        );
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&LogSeries::one(ORDER)).unwrap(), a);
    }

    #[test]
    fn ramified_ring_axioms(a in ramified(), b in ramified(), c in ramified()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c)).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap())
        );
        prop_assert_eq!(
            a.theta().mul(&b).unwrap().add(&a.mul(&b.theta()).unwrap()),
            a.mul(&b).unwrap().theta()
        );
    }

    #[test]
    fn theta_is_a_derivation(a in series(), b in series()) {
        let lhs = a.mul(&b).unwrap().theta();
        let rhs = a.theta().mul(&b).unwrap().add(&a.mul(&b.theta()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_leibniz_with_logs(a in series(), k in 1u8..=2) {
        let l = LogSeries::log_z(ORDER).pow(k as u32).unwrap();
        let lhs = a.mul(&l).unwrap().theta();
        let rhs = a.theta().mul(&l).unwrap().add(&a.mul(&l.theta()).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_is_two_sided(u in unit()) {
        let inv = u.invert().unwrap();
        prop_assert_eq!(u.mul(&inv).unwrap(), LogSeries::one(ORDER));
        prop_assert_eq!(inv.invert().unwrap(), u);
    }

    #[test]
    fn reversion_roundtrip(s in no_constant(), c1 in 1i64..=4) {
        let a = s.sub(&LogSeries::monomial(s.coeff_at(1, 0), 1, 0, ORDER).unwrap())
            .add(&LogSeries::monomial(c1, 1, 0, ORDER).unwrap());
        let b = a.revert().unwrap();
        prop_assert_eq!(a.compose(&b).unwrap(), LogSeries::z(ORDER));
        prop_assert_eq!(b.compose(&a).unwrap(), LogSeries::z(ORDER));
    }

    #[test]
    fn exp_log_inverse(s in no_constant()) {
        let e = s.exp_series().unwrap();
        prop_assert_eq!(e.log_series().unwrap(), s.clone());
        let t = s.add(&LogSeries::one(ORDER));
        prop_assert_eq!(t.log_series().unwrap().exp_series().unwrap(), t);
    }

    #[test]
    fn exp_is_a_homomorphism(a in no_constant(), b in no_constant()) {
        prop_assert_eq!(
            a.add(&b).exp_series().unwrap(),
            a.exp_series().unwrap().mul(&b.exp_series().unwrap()).unwrap()
        );
    }

    #[test]
    fn truncation_commutes_with_product(a in series(), b in series(), n in 1i64..ORDER) {
        prop_assert_eq!(
            a.mul(&b).unwrap().truncate(n),
            a.truncate(n).mul(&b.truncate(n)).unwrap()
        );
    }

    #[test]
    fn json_roundtrip(a in ramified()) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<LogSeries>(&text).unwrap(), a);
    }
}
