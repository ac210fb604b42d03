use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use qexp::algebraic::{q2, FieldElement};
use qexp::dynamics::{MapOrder, SystemContext};
use qexp::words::{FiniteWord, PeriodicWord};

fn digits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..=max)
}

fn periodic() -> impl Strategy<Value = PeriodicWord> {
    (digits(6), prop::collection::vec(0u8..2, 1..=6)).prop_map(|(pre, per)| {
        PeriodicWord::new(FiniteWord::new(pre).unwrap(), FiniteWord::new(per).unwrap()).unwrap()
    })
}

fn element() -> impl Strategy<Value = FieldElement> {
    prop::collection::vec((-20i64..=20, 1i64..=9), 4).prop_map(|c| {
        let coeffs: Vec<BigRational> = c
            .into_iter()
            .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        FieldElement::from_coeffs(&q2(), &coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_identity(w in periodic()) {
        let ctx = SystemContext::q2();
        prop_assert_eq!(ctx.value(&w.reflect()), ctx.domain_hi() - ctx.value(&w));
    }

    #[test]
    fn parser_round_trip(w in periodic()) {
        let text = w.to_string();
        prop_assert_eq!(PeriodicWord::parse(&text).unwrap(), w);
    }

    #[test]
    fn finite_round_trip(d in prop::collection::vec(0u8..2, 1..=20)) {
        let w = FiniteWord::new(d).unwrap();
        prop_assert_eq!(FiniteWord::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn field_axioms(a in element(), b in element(), c in element()) {
        let zero = FieldElement::zero(&q2());
        let one = FieldElement::one(&q2());
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &zero, a.clone());
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inverse().unwrap(), one);
        }
    }

    #[test]
    fn ordering_is_consistent(a in element(), b in element()) {
        let d = &a - &b;
        prop_assert_eq!(a.cmp_exact(&b) as i8, d.sign());
    }

    #[test]
    fn canonical_form_is_value_preserving(pre in digits(5), per in prop::collection::vec(0u8..2, 1..=4), reps in 1usize..4, unroll in 0usize..4) {
        let ctx = SystemContext::q2();
        let pre = FiniteWord::new(pre).unwrap();
        let per = FiniteWord::new(per).unwrap();
        let a = PeriodicWord::new(pre.clone(), per.clone()).unwrap();
        let b = PeriodicWord::new(pre.concat(&per.repeat(unroll)), per.repeat(reps)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(ctx.value(&a), ctx.value(&b));
    }

    #[test]
    fn shift_property(w in periodic()) {
        let ctx = SystemContext::q2();
        let d = ctx.constant(w.digit_at(0) as i64);
        prop_assert_eq!(ctx.value(&w), (d + ctx.value(&w.shift())) * ctx.q_inv());
    }

    #[test]
    fn conjugacy(w in periodic(), s in 0u8..2) {
        let ctx = SystemContext::q2();
        let x = ctx.value(&w);
        let tx = ctx.q() * &x - ctx.constant(s as i64);
        let tr = ctx.q() * ctx.reflect_point(&x) - ctx.constant(1 - s as i64);
        prop_assert_eq!(ctx.reflect_point(&tx), tr);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn order_identity(w in periodic(), map in prop::collection::vec(0u8..2, 1..=8)) {
        let ctx = SystemContext::q2();
        let x = ctx.value(&w);
        let map = FiniteWord::new(map).unwrap();
        let composed = ctx.apply_word(&x, &map, MapOrder::Composition);
        let forward = ctx.apply_word(&x, &map.reversed(), MapOrder::Forward);
        prop_assert_eq!(composed.is_ok(), forward.is_ok());
        if let (Ok(a), Ok(b)) = (composed, forward) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn following_own_digits_stays_in_domain(w in periodic()) {
        let ctx = SystemContext::q2();
        let x = ctx.value(&w);
        let n = w.preperiod().len() + w.period().len();
        let y = ctx.apply_word(&x, &w.prefix(n), MapOrder::Forward).unwrap();
        let mut shifted = w.clone();
        for _ in 0..n {
            shifted = shifted.shift();
        }
        prop_assert_eq!(y, ctx.value(&shifted));
    }
}
