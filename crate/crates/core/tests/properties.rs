//! Property tests for the algebraic core: field axioms in Q(zeta_N), Weyl
//! composition laws, weight grading, and the twisted trace identity.

use lefschetz_core::gtrace::{gamma_trace, trace_property_check};
use lefschetz_core::weyl::{DiagonalAction, FormalDiffOp};
use lefschetz_core::Cyclotomic;
use proptest::prelude::*;

fn cyclotomic() -> impl Strategy<Value = Cyclotomic> {
    // small combinations a + b zeta_N^e over a few conductors
    (
        1u64..=6,
        -4i64..=4,
        -4i64..=4,
        0i64..=5,
    )
        .prop_map(|(n, a, b, e)| {
            &Cyclotomic::from_int(a) + &Cyclotomic::zeta(n, e).scale(&lefschetz_core::scalars::rat(b, 1))
        })
}

fn scalar_monomial() -> impl Strategy<Value = FormalDiffOp> {
    (0i64..=3, 0u32..=3, -3i64..=3).prop_map(|(p, d, c)| {
        FormalDiffOp::scalar_monomial(1, vec![p], vec![d], Cyclotomic::from_int(c))
    })
}

fn small_op() -> impl Strategy<Value = FormalDiffOp> {
    proptest::collection::vec(scalar_monomial(), 1..=3)
        .prop_map(|ms| ms.iter().fold(FormalDiffOp::zero(1, 1), |acc, m| acc.add(m)))
}

fn twist() -> impl Strategy<Value = DiagonalAction> {
    prop_oneof![
        Just(DiagonalAction::scalar(vec![Cyclotomic::from_int(-1)], 2).unwrap()),
        Just(DiagonalAction::scalar(vec![Cyclotomic::zeta(4, 1)], 4).unwrap()),
        Just(DiagonalAction::scalar(vec![Cyclotomic::zeta(3, 1)], 3).unwrap()),
        Just(DiagonalAction::scalar(vec![Cyclotomic::zeta(6, 1)], 6).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_ring_axioms(a in cyclotomic(), b in cyclotomic(), c in cyclotomic()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &(&b * &c), &(&a * &b) * &c);
    }

    #[test]
    fn field_inverses(a in cyclotomic()) {
        if !a.is_zero() {
            let inv = a.inv().unwrap();
            prop_assert_eq!(&a * &inv, Cyclotomic::one());
        }
    }

    #[test]
    fn embedding_is_a_homomorphism(a in cyclotomic(), b in cyclotomic()) {
        let lhs = (&a * &b).to_complex();
        let rhs = a.to_complex() * b.to_complex();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn composition_is_associative(a in small_op(), b in small_op(), c in small_op()) {
        let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
        let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_matches_application(a in small_op(), b in small_op(), e in 0i64..=4) {
        use lefschetz_core::weyl::PolyVec;
        let p = PolyVec::monomial(1, vec![e], Cyclotomic::one());
        let lhs = a.compose(&b).unwrap().apply(&p).unwrap();
        let rhs = a.apply(&b.apply(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_act_is_multiplicative(a in small_op(), b in small_op(), g in twist()) {
        let lhs = a.compose(&b).unwrap().gamma_act(&g);
        let rhs = a.gamma_act(&g).compose(&b.gamma_act(&g)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn weight_grading_is_preserved(a in scalar_monomial(), b in scalar_monomial()) {
        let (ma, mb) = match (a.terms().next(), b.terms().next()) {
            (Some((m, _)), Some((n, _))) => (m.weight(), n.weight()),
            _ => return Ok(()),
        };
        let prod = a.compose(&b).unwrap();
        for (m, _) in prod.terms() {
            prop_assert_eq!(m.weight()[0], ma[0] + mb[0]);
        }
    }

    #[test]
    fn trace_law_holds(a in small_op(), b in small_op(), g in twist()) {
        prop_assert!(trace_property_check(&a, &b, &g).unwrap());
        let k = a.twisted_commutator(&b, &g).unwrap();
        prop_assert!(gamma_trace(&k, &g).unwrap().value.is_zero());
    }

    #[test]
    fn trace_is_linear(a in small_op(), b in small_op(), g in twist(), s in -3i64..=3) {
        let sc = Cyclotomic::from_int(s);
        let lhs = gamma_trace(&a.scale(&sc).add(&b), &g).unwrap().value;
        let rhs = &(&gamma_trace(&a, &g).unwrap().value * &sc)
            + &gamma_trace(&b, &g).unwrap().value;
        prop_assert_eq!(lhs, rhs);
    }
}
