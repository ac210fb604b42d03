//! Library results against independent computations: floating-point series,
//! bisection on the minimal polynomial, and brute-force prefix enumeration.

use qexp::algebraic::{q2, FieldElement};
use qexp::classify::{Classifier, Family, FamilyPoint};
use qexp::dynamics::{MapOrder, SearchLimits, SystemContext};
use qexp::words::{closed_form_family, FamilyShape, FiniteWord, PeriodicWord};

fn q2_f64() -> f64 {
    let f = |x: f64| x.powi(4) - 2.0 * x * x - x - 1.0;
    let (mut lo, mut hi) = (1.5f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn series(word: &PeriodicWord, q: f64) -> f64 {
    (0..600).fold((0.0, 1.0 / q), |(acc, w), i| (acc + w * word.digit_at(i) as f64, w / q)).0
}

fn pw(s: &str) -> PeriodicWord {
    PeriodicWord::parse(s).unwrap()
}

#[test]
fn base_matches_bisection() {
    let ctx = SystemContext::q2();
    assert!((ctx.q().to_f64() - q2_f64()).abs() < 1e-14);
    assert_eq!(ctx.q().to_decimal(5), "1.71064");
}

#[test]
fn word_values_match_series() {
    let ctx = SystemContext::q2();
    let q = q2_f64();
    for s in [
        "0^inf",
        "1^inf",
        "(10)^inf",
        "(01)^inf",
        "0^2(01)^3(10)^inf",
        "01^3(10)^inf",
        "(0110)^inf",
        "(1001)^inf",
        "1101(011)^inf",
        "10^4(01)^2(10)^inf",
    ] {
        let w = pw(s);
        assert!((ctx.value(&w).to_f64() - series(&w, q)).abs() < 1e-12, "{s}");
    }
}

#[test]
fn closed_forms_match_series() {
    let field = q2();
    let q = q2_f64();
    for shape in [FamilyShape::Type01, FamilyShape::Type10] {
        for m in 0..5 {
            for k in 1..6 {
                let w = shape.word(m, k);
                let closed = closed_form_family(m, k, shape, &field).to_f64();
                assert!((closed - series(&w, q)).abs() < 1e-12, "{shape:?} {m} {k}");
            }
        }
    }
}

#[test]
fn j_endpoints_closed_form() {
    let ctx = SystemContext::q2();
    let q = ctx.q();
    let one = ctx.constant(1);
    let den = q.pow(4).unwrap() - &one;
    let (lo, hi) = ctx.j_interval();
    assert_eq!(lo, (q + q * q) / &den);
    assert_eq!(hi, (one + q.pow(3).unwrap()) / den);
    assert_eq!(lo.to_decimal(6), "0.613089");
    assert_eq!(hi.to_decimal(6), "0.794085");
}

/// Every digit prefix of length n whose remainder stays in the domain.
fn live_prefixes(x: &FieldElement, n: usize) -> Vec<(FiniteWord, FieldElement)> {
    let field = x.field().clone();
    let q = FieldElement::generator(&field);
    let one = FieldElement::one(&field);
    let upper = one.clone() / (&q - &one);
    let zero = FieldElement::zero(&field);
    let mut live = vec![(FiniteWord::empty(), x.clone())];
    for _ in 0..n {
        let mut next = Vec::new();
        for (w, r) in &live {
            for d in 0..2u8 {
                let r2 = &q * r - FieldElement::from_int(&field, d);
                if r2 >= zero && r2 <= upper {
                    let mut w2 = w.clone();
                    w2.push(d);
                    next.push((w2, r2));
                }
            }
        }
        live = next;
    }
    live
}

#[test]
fn brute_force_two_expansions() {
    let ctx = SystemContext::q2();
    for family in [Family::ZerosEps, Family::OnesEps] {
        for m in 0..=3 {
            for k in 1..=3 {
                for reflected in [false, true] {
                    let p = FamilyPoint::new(&ctx, family, m, Some(k), reflected);
                    let brute = live_prefixes(&p.value, 25);
                    assert_eq!(brute.len(), 2, "{}", p.label());
                    assert_eq!(live_prefixes(&p.value, 24).len(), 2);
                    let counted = ctx.count_expansions(&p.value, &SearchLimits::for_word(&p.word));
                    let mut ours: Vec<FiniteWord> = match counted {
                        qexp::dynamics::CountResult::Exact { expansions } => {
                            expansions.iter().map(|w| w.prefix(25)).collect()
                        }
                        other => panic!("{}: {}", p.label(), other.label()),
                    };
                    let mut theirs: Vec<FiniteWord> = brute.into_iter().map(|(w, _)| w).collect();
                    ours.sort();
                    theirs.sort();
                    assert_eq!(ours, theirs, "{}", p.label());
                }
            }
        }
    }
}

#[test]
fn brute_force_unique_expansions() {
    let ctx = SystemContext::q2();
    for k in 0..=5 {
        for s in [format!("0^{k}(10)^inf"), format!("1^{k}(01)^inf")] {
            let w = pw(&s);
            let brute = live_prefixes(&ctx.value(&w), 25);
            assert_eq!(brute.len(), 1, "{s}");
            assert_eq!(brute[0].0, w.prefix(25));
        }
    }
}

#[test]
fn brute_force_branching_grows() {
    // Both ends of J have a continuum of expansions: the prefix count keeps growing.
    let ctx = SystemContext::q2();
    let x = ctx.value(&pw("(1001)^inf"));
    let a = live_prefixes(&x, 12).len();
    let b = live_prefixes(&x, 24).len();
    assert!(b > a && a > 2, "{a} {b}");
}

#[test]
fn table_endpoints_from_series() {
    let cls = Classifier::new();
    let q = q2_f64();
    let region = cls.region();
    for m in 1..=4 {
        let hi0 = series(&FamilyShape::Type01.word(m, 1), q);
        let lo1 = 1.0 / (q - 1.0) - hi0;
        let hi1 = series(&FamilyShape::Type10.word(m, 1), q);
        let lo0 = 1.0 / (q - 1.0) - hi1;
        let i0 = region.interval(m, 0);
        let i1 = region.interval(m, 1);
        for (exact, float) in [(&i0.lo, lo0), (&i0.hi, hi0), (&i1.lo, lo1), (&i1.hi, hi1)] {
            assert!((exact.to_f64() - float).abs() < 1e-12, "m={m}");
        }
    }
}

#[test]
fn escape_landings_in_floating_point() {
    let q = q2_f64();
    let target = (2.0 * q - 1.0) / (q.powi(3) - q);
    for k in 1..=8 {
        let x = series(&FamilyShape::Type01.word(1, k), q);
        // (10)^(k-1) 0001, rightmost digit applied first.
        let mut digits: Vec<u8> = vec![1, 0, 0, 0];
        for _ in 0..k - 1 {
            digits.extend([0, 1]);
        }
        let y = digits.iter().fold(x, |acc, &d| q * acc - d as f64);
        assert!((y - target).abs() < 1e-6, "k={k}: {y}");
    }
    let ctx = SystemContext::q2();
    let x = ctx.value(&FamilyShape::Type01.word(1, 3));
    let w = FiniteWord::parse("10100001").unwrap();
    let y = ctx.apply_word(&x, &w, MapOrder::Composition).unwrap();
    assert_eq!(y.to_decimal(6), "0.734788");
}
