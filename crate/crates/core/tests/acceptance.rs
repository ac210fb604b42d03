//! Acceptance suite: one line per criterion, with its runtime limit.
//! Exits nonzero if any criterion fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qexp::algebraic::{q2, registry, FieldElement};
use qexp::classify::{BranchKind, Classifier, EscapeSource, Family, FamilyPoint};
use qexp::dynamics::{CountResult, MapOrder, SearchLimits, SystemContext};
use qexp::paperlab::{agrees_with_printed, check_a1_root_grid, verify_parametric_identity, ParametricClaim};
use qexp::words::{FiniteWord, PeriodicWord};

struct Outcome {
    ok: bool,
    summary: String,
}

fn outcome(ok: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        summary: summary.into(),
    }
}

type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

const TABLE: [[(&str, &str); 2]; 4] = [
    [("0.602117", "0.670382"), ("0.736792", "0.805057")],
    [("0.693711", "0.733617"), ("0.673557", "0.713464")],
    [("0.747254", "0.770582"), ("0.636592", "0.65992")],
    [("0.778554", "0.792191"), ("0.614983", "0.62862")],
];

fn constants() -> Outcome {
    let printed = [("q2", "1.71064"), ("qf", "1.75488"), ("qG", "1.61803"), ("qaleph0", "1.64541")];
    let mut bad = Vec::new();
    for c in registry() {
        if let Some((_, p)) = printed.iter().find(|(k, _)| *k == c.key) {
            if !agrees_with_printed(&FieldElement::generator(&c.field), p) {
                bad.push(c.key);
            }
        }
    }
    let f = q2();
    let q = FieldElement::generator(&f);
    let quartic = q.pow(4).unwrap() - q.pow(2).unwrap().mul_int(2) - &q - FieldElement::one(&f);
    let ok = bad.is_empty() && quartic.is_zero();
    outcome(ok, format!("4 constants to printed figures, quartic vanishes: {}; mismatches {bad:?}", quartic.is_zero()))
}

fn table(cls: &Classifier) -> Outcome {
    let region = cls.region();
    let mut matched = 0;
    for (m, row) in (1..=4).zip(TABLE) {
        for (col, (lo, hi)) in row.into_iter().enumerate() {
            let i = region.interval(m, col);
            matched += agrees_with_printed(&i.lo, lo) as usize + agrees_with_printed(&i.hi, hi) as usize;
        }
    }
    outcome(matched == 16, format!("{matched}/16 endpoints agree to ±1 in the 6th figure"))
}

fn j_endpoints(cls: &Classifier) -> Outcome {
    let r = cls.region();
    let (lo, hi) = (r.j_lo.to_decimal(6), r.j_hi.to_decimal(6));
    outcome(lo == "0.613089" && hi == "0.794085", format!("J = [{lo}, {hi}]"))
}

fn a1_equation(cls: &Classifier) -> Outcome {
    let sols = cls.solve_a1_equation(50, 50);
    let grid = check_a1_root_grid(10);
    outcome(
        sols == vec![(1, 3), (3, 1)] && grid.passed(),
        format!("zeros {sols:?}; root grid j,k ≤ 10 monotone: {}", grid.passed()),
    )
}

fn counting(cls: &Classifier) -> Outcome {
    let ctx = cls.ctx();
    let exact_ok = |x: &FieldElement, w: &PeriodicWord, n: usize| {
        let r = ctx.count_expansions(x, &SearchLimits::for_word(w));
        r.exact_count() == Some(n) && r.verify(ctx, x)
    };
    let mut unique = 0;
    for k in 0..=5 {
        for s in [format!("0^{k}(10)^inf"), format!("1^{k}(01)^inf")] {
            let w = PeriodicWord::parse(&s).unwrap();
            unique += exact_ok(&ctx.value(&w), &w, 1) as usize;
        }
    }
    let (mut two, mut total) = (0, 0);
    for family in [Family::ZerosEps, Family::OnesEps] {
        for m in 0..=5 {
            for k in 1..=5 {
                for reflected in [false, true] {
                    let p = FamilyPoint::new(ctx, family, m, Some(k), reflected);
                    two += exact_ok(&p.value, &p.word, 2) as usize;
                    total += 1;
                }
            }
        }
    }
    let mut witnesses = 0;
    for s in ["(1001)^inf", "(0110)^inf"] {
        let x = ctx.value(&PeriodicWord::parse(s).unwrap());
        let r = ctx.count_expansions(&x, &SearchLimits::default());
        witnesses += (matches!(r, CountResult::InfiniteWitness { .. }) && r.verify(ctx, &x)) as usize;
    }
    outcome(
        unique == 12 && two == total && witnesses == 2,
        format!("Exact(1) {unique}/12, Exact(2) {two}/{total}, InfiniteWitness {witnesses}/2, certificates re-evaluated"),
    )
}

/// In-switch family values other than the two A1 points, in a fixed order.
#[allow(clippy::mutable_key_type)]
fn switch_sample(cls: &Classifier, n: usize) -> Vec<FamilyPoint> {
    let ctx = cls.ctx();
    let mut seen: HashSet<FieldElement> = cls.a1_points().iter().cloned().collect();
    let mut out = Vec::new();
    for k in 1..=8 {
        for m in 0..=8 {
            for family in [Family::Type01, Family::Type10, Family::ZerosEps, Family::OnesEps] {
                for reflected in [false, true] {
                    let p = FamilyPoint::new(ctx, family, m, Some(k), reflected);
                    if ctx.in_switch(&p.value) && seen.insert(p.value.clone()) {
                        out.push(p);
                        if out.len() == n {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

fn a1_classification(cls: &Classifier) -> Outcome {
    let a1_ok = cls
        .a1_points()
        .iter()
        .all(|x| matches!(cls.branch_class(x), Ok(b) if b.kind == BranchKind::A1));
    let sample = switch_sample(cls, 200);
    let wrong: Vec<String> = sample
        .iter()
        .filter(|p| !matches!(cls.branch_class(&p.value), Ok(b) if b.kind != BranchKind::A1))
        .map(FamilyPoint::label)
        .collect();
    outcome(
        a1_ok && sample.len() == 200 && wrong.is_empty(),
        format!(
            "both stated points A1: {a1_ok}; {} sampled switch-region points, {} classified A1 or undecided {wrong:?}",
            sample.len(),
            wrong.len()
        ),
    )
}

fn printed_landings(cls: &Classifier) -> Outcome {
    let ctx = cls.ctx();
    let cases: [(Family, usize, Option<usize>, &str, &str); 6] = [
        (Family::Type01, 1, Some(1), "0001", "0.734788"),
        (Family::Limit, 2, None, "001", "0.672386"),
        (Family::Type01, 2, Some(1), "001", "0.746083"),
        (Family::Type01, 2, Some(2), "001", "0.69757"),
        (Family::Type01, 2, Some(3), "001", "0.680992"),
        (Family::Type01, 2, Some(4), "001", "0.675327"),
    ];
    let mut got = Vec::new();
    let mut ok = true;
    for (family, m, k, word, printed) in cases {
        let p = FamilyPoint::new(ctx, family, m, k, false);
        match ctx.apply_word(&p.value, &FiniteWord::parse(word).unwrap(), MapOrder::Composition) {
            Ok(y) => {
                ok &= agrees_with_printed(&y, printed);
                got.push(y.to_decimal(6));
            }
            Err(_) => ok = false,
        }
    }
    outcome(ok, format!("landings {}", got.join(", ")))
}

fn parametric() -> Outcome {
    let failed: Vec<&str> = ParametricClaim::ALL
        .iter()
        .filter(|&&c| !verify_parametric_identity(c, 50).passed())
        .map(|c| c.id())
        .collect();
    outcome(
        failed.is_empty(),
        format!("8 families symbolic in k, concrete k ≤ 50 agree exactly; failures {failed:?}"),
    )
}

fn escape_all_members(cls: &Classifier) -> Outcome {
    let members = match cls.a2_in_j_members(12) {
        Ok(m) => m,
        Err(e) => return outcome(false, format!("enumeration failed: {e}")),
    };
    let certs = qexp::paperlab::escape_certificates(cls, &members, 10);
    let mut verified = 0;
    let mut searched = Vec::new();
    for (p, c) in members.iter().zip(&certs) {
        if let Ok(cert) = c {
            if cert.verify(cls) {
                verified += 1;
                if cert.source == EscapeSource::Search {
                    searched.push(p.label());
                }
            }
        }
    }
    let designated = verified - searched.len();
    outcome(
        verified == members.len() && !members.is_empty(),
        format!(
            "{verified}/{} members certified in J∖A2; designated words {designated}, search {searched:?} (the designated word 1^2 0 leaves J at 10^2 e_1)",
            members.len()
        ),
    )
}

fn random_periodic(rng: &mut ChaCha8Rng) -> PeriodicWord {
    let pre: Vec<u8> = (0..rng.gen_range(0..=8)).map(|_| rng.gen_range(0..2)).collect();
    let per: Vec<u8> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..2)).collect();
    PeriodicWord::new(FiniteWord::new(pre).unwrap(), FiniteWord::new(per).unwrap()).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng) -> FieldElement {
    let coeffs: Vec<BigRational> = (0..4)
        .map(|_| BigRational::new(BigInt::from(rng.gen_range(-50..=50)), BigInt::from(rng.gen_range(1..=12))))
        .collect();
    FieldElement::from_coeffs(&q2(), &coeffs).unwrap()
}

fn properties() -> Outcome {
    let ctx = SystemContext::q2();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut reflection = 0;
    let mut round_trip = 0;
    for _ in 0..200 {
        let w = random_periodic(&mut rng);
        reflection += (ctx.value(&w.reflect()) == ctx.domain_hi() - ctx.value(&w)) as usize;
        round_trip += (PeriodicWord::parse(&w.to_string()).as_ref() == Ok(&w)) as usize;
    }
    let mut axioms = 0;
    for _ in 0..200 {
        let (a, b, c) = (random_element(&mut rng), random_element(&mut rng), random_element(&mut rng));
        let holds = &a + &b == &b + &a
            && &a * &b == &b * &a
            && &(&a + &b) + &c == &a + &(&b + &c)
            && &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && (a.is_zero() || (&a * &a.inverse().unwrap()) == FieldElement::one(&q2()));
        axioms += holds as usize;
    }
    let mut order = 0;
    for _ in 0..100 {
        let x = ctx.value(&random_periodic(&mut rng));
        let map: Vec<u8> = (0..rng.gen_range(1..=8)).map(|_| rng.gen_range(0..2)).collect();
        let map = FiniteWord::new(map).unwrap();
        let a = ctx.apply_word(&x, &map, MapOrder::Composition);
        let b = ctx.apply_word(&x, &map.reversed(), MapOrder::Forward);
        order += match (a, b) {
            (Ok(a), Ok(b)) => a == b,
            (Err(_), Err(_)) => true,
            _ => false,
        } as usize;
    }
    outcome(
        reflection == 200 && round_trip == 200 && axioms == 200 && order == 100,
        format!("reflection {reflection}/200, field axioms {axioms}/200, round trip {round_trip}/200, order identity {order}/100"),
    )
}

fn main() {
    let cls = Classifier::new();
    let criteria: Vec<Criterion> = vec![
        ("1 constants", Duration::from_secs(1), Box::new(constants)),
        ("2 interval table", Duration::from_secs(1), Box::new(|| table(&cls))),
        ("3 J endpoints", Duration::from_secs(1), Box::new(|| j_endpoints(&cls))),
        ("4 A1 equation", Duration::from_secs(30), Box::new(|| a1_equation(&cls))),
        ("5 counting oracle", Duration::from_secs(30), Box::new(|| counting(&cls))),
        ("6 A1 classification", Duration::from_secs(30), Box::new(|| a1_classification(&cls))),
        ("7 printed landings", Duration::from_secs(1), Box::new(|| printed_landings(&cls))),
        ("8 parametric identities", Duration::from_secs(5), Box::new(parametric)),
        ("9 escape certificates", Duration::from_secs(300), Box::new(|| escape_all_members(&cls))),
        ("10 property suites", Duration::from_secs(60), Box::new(properties)),
    ];
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let ok = o.ok && elapsed <= limit;
        failures += !ok as usize;
        println!(
            "{} criterion {name}: {} [{:.2?} / limit {:?}]",
            if ok { "PASS" } else { "FAIL" },
            o.summary,
            elapsed,
            limit
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
