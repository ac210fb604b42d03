//! Named bases in (1, 2) and their defining polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::sync::{Arc, OnceLock};

use super::field::{Field, FieldElement, FieldSpec};

/// A registry entry. Each polynomial is assumed irreducible over ℚ; sign
/// determination in the field depends on it.
#[derive(Clone, Debug)]
pub struct RegisteredConstant {
    pub key: &'static str,
    pub field: Field,
}

fn build(name: &str, coeffs: &[i64]) -> Field {
    let minpoly = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    FieldSpec::from_search(name, minpoly, (&one, &two))
        .unwrap_or_else(|e| panic!("registered constant {name}: {e}"))
}

macro_rules! constant {
    ($fn:ident, $name:literal, $coeffs:expr, $doc:literal) => {
        #[doc = $doc]
        pub fn $fn() -> Field {
            static CELL: OnceLock<Field> = OnceLock::new();
            Arc::clone(CELL.get_or_init(|| build($name, &$coeffs)))
        }
    };
}

constant!(q2, "q2", [-1, -1, -2, 0, 1], "Root of x^4 - 2x^2 - x - 1 in (1, 2).");
constant!(q_f, "qf", [-1, 1, -2, 1], "Root of x^3 - 2x^2 + x - 1 in (1, 2).");
constant!(q_golden, "qG", [-1, -1, 1], "Root of x^2 - x - 1 in (1, 2).");
constant!(
    q_aleph0,
    "qaleph0",
    [-1, -1, -2, -1, -1, 0, 1],
    "Root of x^6 - x^4 - x^3 - 2x^2 - x - 1 in (1, 2)."
);

pub fn registry() -> Vec<RegisteredConstant> {
    vec![
        RegisteredConstant { key: "q2", field: q2() },
        RegisteredConstant { key: "qf", field: q_f() },
        RegisteredConstant { key: "qG", field: q_golden() },
        RegisteredConstant { key: "qaleph0", field: q_aleph0() },
    ]
}

/// Text table: name, coefficients (lowest degree first), isolating interval
/// and a 20-digit decimal of the root.
pub fn constants_table() -> String {
    let rows: Vec<[String; 4]> = registry()
        .iter()
        .map(|c| {
            let f = &c.field;
            let coeffs = f
                .minpoly()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",");
            let (lo, hi) = f.isolating_interval();
            [
                c.key.to_string(),
                format!("[{coeffs}]"),
                format!("({lo}, {hi})"),
                FieldElement::generator(f).to_decimal(20),
            ]
        })
        .collect();
    let header = ["name", "coefficients", "isolating_interval", "decimal"];
    let widths: Vec<usize> = (0..4)
        .map(|i| rows.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap())
        .collect();
    let line = |cells: [&str; 4]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for r in &rows {
        out.push_str(&line([&r[0], &r[1], &r[2], &r[3]]));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registered_roots_lie_in_unit_to_two() {
        for c in registry() {
            let q = FieldElement::generator(&c.field);
            let one = FieldElement::one(&c.field);
            assert_eq!((&q - &one).sign(), 1, "{}", c.key);
            assert_eq!((one.mul_int(2) - &q).sign(), 1, "{}", c.key);
        }
    }

    #[test]
    fn table_lists_every_constant() {
        let t = constants_table();
        assert_eq!(t.lines().count(), 5);
        assert!(t.contains("q2") && t.contains("qaleph0"));
    }
}
