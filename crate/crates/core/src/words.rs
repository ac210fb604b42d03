//! Finite and eventually periodic words over {0, 1}.
//!
//! Text notation:
//!
//! ```text
//! word := atom+
//! atom := ('0' | '1' | '(' word ')') ('^' (int | 'inf'))?
//! ```
//!
//! An atom raised to `inf` is the period and must come last. Whitespace is
//! ignored. `"(01)^2(10)^inf"`, `"0^inf"` and `"01^3(10)^inf"` are all valid.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::algebraic::{Field, FieldElement};

const MAX_EXPONENT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("the period of an infinite word must be nonempty")]
    EmptyPeriod,
    #[error("digit {0} is not 0 or 1")]
    InvalidDigit(u8),
    #[error("expected an infinite word, found a finite one")]
    ExpectedPeriodic,
    #[error("expected a finite word, found an infinite one")]
    ExpectedFinite,
}

/// A finite word over {0, 1}; possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord(Vec<u8>);

impl FiniteWord {
    pub fn new(digits: Vec<u8>) -> Result<Self, WordError> {
        if let Some(&d) = digits.iter().find(|&&d| d > 1) {
            return Err(WordError::InvalidDigit(d));
        }
        Ok(FiniteWord(digits))
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    /// `digit` repeated `n` times.
    pub fn run(digit: u8, n: usize) -> Self {
        assert!(digit <= 1);
        FiniteWord(vec![digit; n])
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reflect(&self) -> Self {
        FiniteWord(self.0.iter().map(|d| 1 - d).collect())
    }

    pub fn reversed(&self) -> Self {
        FiniteWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &FiniteWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteWord(v)
    }

    pub fn repeat(&self, n: usize) -> Self {
        FiniteWord(self.0.repeat(n))
    }

    pub fn push(&mut self, digit: u8) {
        assert!(digit <= 1);
        self.0.push(digit);
    }

    /// Parses a word that must be finite.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        match parse_word(text)? {
            Word::Finite(w) => Ok(w),
            Word::Periodic(_) => Err(WordError::ExpectedFinite),
        }
    }

    /// Primitive root: the shortest word whose power is `self`.
    fn primitive_root(&self) -> FiniteWord {
        let n = self.0.len();
        for l in 1..n {
            if n.is_multiple_of(l) && (l..n).all(|i| self.0[i] == self.0[i - l]) {
                return FiniteWord(self.0[..l].to_vec());
            }
        }
        self.clone()
    }
}

impl From<&[u8]> for FiniteWord {
    fn from(d: &[u8]) -> Self {
        FiniteWord::new(d.to_vec()).expect("binary digits")
    }
}

/// An eventually periodic infinite word `preperiod (period)^∞`, always kept
/// in canonical form: the period is primitive and the preperiod is as short
/// as possible. Two values denote the same sequence iff they are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicWord {
    preperiod: FiniteWord,
    period: FiniteWord,
}

impl PeriodicWord {
    pub fn new(preperiod: FiniteWord, period: FiniteWord) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        let mut pre = preperiod.0;
        let mut per = period.primitive_root().0;
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(PeriodicWord {
            preperiod: FiniteWord(pre),
            period: FiniteWord(per),
        })
    }

    /// `(01)^k (10)^∞`.
    pub fn epsilon(k: usize) -> Self {
        Self::new(FiniteWord(vec![0, 1]).repeat(k), FiniteWord(vec![1, 0])).unwrap()
    }

    /// `digit^∞`.
    pub fn constant(digit: u8) -> Self {
        Self::new(FiniteWord::empty(), FiniteWord::run(digit, 1)).unwrap()
    }

    pub fn parse(text: &str) -> Result<Self, WordError> {
        match parse_word(text)? {
            Word::Periodic(w) => Ok(w),
            Word::Finite(_) => Err(WordError::ExpectedPeriodic),
        }
    }

    pub fn preperiod(&self) -> &FiniteWord {
        &self.preperiod
    }

    pub fn period(&self) -> &FiniteWord {
        &self.period
    }

    pub fn digit_at(&self, i: usize) -> u8 {
        let p = self.preperiod.len();
        if i < p {
            self.preperiod.0[i]
        } else {
            self.period.0[(i - p) % self.period.len()]
        }
    }

    pub fn first_digit(&self) -> u8 {
        self.digit_at(0)
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: usize) -> FiniteWord {
        FiniteWord((0..n).map(|i| self.digit_at(i)).collect())
    }

    /// Drops the first digit.
    pub fn shift(&self) -> Self {
        if self.preperiod.is_empty() {
            let mut per = self.period.0.clone();
            per.rotate_left(1);
            Self::new(FiniteWord::empty(), FiniteWord(per)).unwrap()
        } else {
            Self::new(FiniteWord(self.preperiod.0[1..].to_vec()), self.period.clone()).unwrap()
        }
    }

    pub fn prepend(&self, prefix: &FiniteWord) -> Self {
        Self::new(prefix.concat(&self.preperiod), self.period.clone()).unwrap()
    }

    pub fn reflect(&self) -> Self {
        Self::new(self.preperiod.reflect(), self.period.reflect()).unwrap()
    }

    /// Exact value `Σ d_i q^-i` in ℚ(q). The base must exceed 1.
    pub fn value(&self, field: &Field) -> FieldElement {
        let q_inv = FieldElement::generator(field)
            .inverse()
            .expect("the base is nonzero");
        self.value_with(&q_inv)
    }

    /// Same as [`value`](Self::value) with a precomputed `q^-1`.
    pub fn value_with(&self, q_inv: &FieldElement) -> FieldElement {
        let field = q_inv.field();
        let one = FieldElement::one(field);
        let head = digit_sum(self.preperiod.digits(), q_inv);
        let tail = digit_sum(self.period.digits(), q_inv);
        let shrink = q_inv.pow(self.preperiod.len() as i64).unwrap();
        let cycle = one - q_inv.pow(self.period.len() as i64).unwrap();
        head + shrink * tail / cycle
    }
}

// Σ d_i q^-i for i = 1..n, by Horner's rule.
fn digit_sum(digits: &[u8], q_inv: &FieldElement) -> FieldElement {
    let field = q_inv.field();
    let one = FieldElement::one(field);
    digits
        .iter()
        .rev()
        .fold(FieldElement::zero(field), |acc, &d| {
            if d == 1 {
                (acc + &one) * q_inv
            } else {
                acc * q_inv
            }
        })
}

/// A parsed word of either kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Finite(FiniteWord),
    Periodic(PeriodicWord),
}

impl Word {
    pub fn reflect(&self) -> Self {
        match self {
            Word::Finite(w) => Word::Finite(w.reflect()),
            Word::Periodic(w) => Word::Periodic(w.reflect()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Finite(w) => w.fmt(f),
            Word::Periodic(w) => w.fmt(f),
        }
    }
}

impl FromStr for Word {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

impl FromStr for FiniteWord {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FiniteWord::parse(s)
    }
}

impl FromStr for PeriodicWord {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PeriodicWord::parse(s)
    }
}

/// Parses the word notation described in the module docs.
pub fn parse_word(text: &str) -> Result<Word, WordError> {
    let mut p = Parser {
        chars: text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect(),
        pos: 0,
        len: text.len(),
    };
    let (pre, period, atoms) = p.sequence(false)?;
    if let Some(c) = p.peek() {
        return Err(p.error(format!("unexpected '{c}'")));
    }
    match period {
        None if atoms == 0 => Err(p.error("empty word".into())),
        None => Ok(Word::Finite(FiniteWord(pre))),
        Some(per) => Ok(Word::Periodic(PeriodicWord::new(
            FiniteWord(pre),
            FiniteWord(per),
        )?)),
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn error(&self, msg: String) -> WordError {
        WordError::Syntax {
            pos: self.offset(),
            msg,
        }
    }

    fn sequence(&mut self, nested: bool) -> Result<Sequence, WordError> {
        let mut out = Vec::new();
        let mut atoms = 0;
        loop {
            let (atom, was_empty_group) = match self.peek() {
                None => break,
                Some(')') if nested => break,
                Some(c @ ('0' | '1')) => {
                    self.pos += 1;
                    (vec![c as u8 - b'0'], false)
                }
                Some('(') => {
                    let open = self.offset();
                    self.pos += 1;
                    let (inner, inner_period, _) = self.sequence(true)?;
                    if inner_period.is_some() {
                        return Err(WordError::Syntax {
                            pos: open,
                            msg: "'^inf' is only allowed on the last atom".into(),
                        });
                    }
                    if self.peek() != Some(')') {
                        return Err(self.error("expected ')'".into()));
                    }
                    self.pos += 1;
                    let empty = inner.is_empty();
                    (inner, empty)
                }
                Some(c) => return Err(self.error(format!("unexpected '{c}'"))),
            };
            atoms += 1;
            if self.peek() == Some('^') {
                self.pos += 1;
                match self.exponent()? {
                    Exponent::Inf => {
                        if nested {
                            return Err(self.error("'^inf' inside a group".into()));
                        }
                        if let Some(c) = self.peek() {
                            return Err(self.error(format!("unexpected '{c}' after '^inf'")));
                        }
                        if atom.is_empty() {
                            return Err(WordError::EmptyPeriod);
                        }
                        return Ok((out, Some(atom), atoms));
                    }
                    Exponent::Count(n) => {
                        if was_empty_group {
                            return Err(self.error("empty group".into()));
                        }
                        out.extend(atom.repeat(n));
                    }
                }
            } else {
                if was_empty_group {
                    return Err(self.error("empty group".into()));
                }
                out.extend(atom);
            }
        }
        Ok((out, None, atoms))
    }

    fn exponent(&mut self) -> Result<Exponent, WordError> {
        let start = self.pos;
        let mut s = String::new();
        let alpha = self.peek().is_some_and(|c| c.is_ascii_alphabetic());
        while let Some(c) = self.peek() {
            if (alpha && c.is_ascii_alphabetic()) || (!alpha && c.is_ascii_digit()) {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if s == "inf" {
            return Ok(Exponent::Inf);
        }
        match s.parse::<u64>() {
            Ok(n) if n <= MAX_EXPONENT => Ok(Exponent::Count(n as usize)),
            Ok(_) => {
                self.pos = start;
                Err(self.error("exponent too large".into()))
            }
            Err(_) => {
                self.pos = start;
                Err(self.error("expected an integer or 'inf' after '^'".into()))
            }
        }
    }
}

type Sequence = (Vec<u8>, Option<Vec<u8>>, usize);

enum Exponent {
    Inf,
    Count(usize),
}

// Greedy run-length notation: repeated blocks of length up to 4 become
// `(block)^n`, repeated single digits `d^n`. Plain digits right after an
// exponent are grouped so the exponent cannot absorb them.
fn compact(digits: &[u8]) -> String {
    let mut out = String::new();
    let mut raw = String::new();
    let mut after_exponent = false;
    let flush = |out: &mut String, raw: &mut String, after_exponent: bool| {
        if !raw.is_empty() {
            if after_exponent {
                out.push_str(&format!("({raw})"));
            } else {
                out.push_str(raw);
            }
            raw.clear();
        }
    };
    let mut i = 0;
    while i < digits.len() {
        let mut best = (1usize, 1usize);
        for l in 1..=4.min(digits.len() - i) {
            let block = &digits[i..i + l];
            let mut r = 1;
            while i + (r + 1) * l <= digits.len() && &digits[i + r * l..i + (r + 1) * l] == block
            {
                r += 1;
            }
            if r >= 2 && l * r > best.0 * best.1 {
                best = (l, r);
            }
        }
        let (l, r) = best;
        let block: String = digits[i..i + l].iter().map(|d| char::from(b'0' + d)).collect();
        if r == 1 {
            raw.push_str(&block);
        } else {
            let wrap = after_exponent && raw.is_empty();
            flush(&mut out, &mut raw, after_exponent);
            if l == 1 && !wrap {
                out.push_str(&format!("{block}^{r}"));
            } else {
                out.push_str(&format!("({block})^{r}"));
            }
            after_exponent = true;
        }
        i += l * r;
    }
    flush(&mut out, &mut raw, after_exponent);
    out
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            // The empty word has no notation of its own.
            return write!(f, "1^0");
        }
        write!(f, "{}", compact(&self.0))
    }
}

impl fmt::Display for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre = compact(&self.preperiod.0);
        let per: String = self.period.0.iter().map(|d| char::from(b'0' + d)).collect();
        if per.len() == 1 && !pre.ends_with(|c: char| c.is_ascii_digit()) {
            write!(f, "{pre}{per}^inf")
        } else {
            write!(f, "{pre}({per})^inf")
        }
    }
}

/// The two word shapes with closed-form values: `01^(m+1) ε_k` and
/// `10^m ε_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyShape {
    Type01,
    Type10,
}

impl FamilyShape {
    /// The word `01^(m+1) ε_k` or `10^m ε_k`.
    pub fn word(self, m: usize, k: usize) -> PeriodicWord {
        let prefix = match self {
            FamilyShape::Type01 => FiniteWord::run(0, 1).concat(&FiniteWord::run(1, m + 1)),
            FamilyShape::Type10 => FiniteWord::run(1, 1).concat(&FiniteWord::run(0, m)),
        };
        PeriodicWord::epsilon(k).prepend(&prefix)
    }
}

/// Closed-form value of `01^(m+1) ε_k` or `10^m ε_k`:
///
/// ```text
/// type01: (q^(m+2k+2) + q^(m+2k+1) - q^(2k+1) + q - 1) / (q^(m+2k+2) (q^2 - 1))
/// type10: (q^(m+2k+2) - q^(m+2k) + q^(2k) + q - 1)     / (q^(m+2k+1) (q^2 - 1))
/// ```
pub fn closed_form_family(m: usize, k: usize, shape: FamilyShape, field: &Field) -> FieldElement {
    assert!(k >= 1, "k must be positive");
    let q = FieldElement::generator(field);
    let one = FieldElement::one(field);
    let p = |e: usize| q.pow(e as i64).unwrap();
    let base = &q * &q - &one;
    let (m, k) = (m, 2 * k);
    match shape {
        FamilyShape::Type01 => {
            let num = p(m + k + 2) + p(m + k + 1) - p(k + 1) + &q - &one;
            num / (p(m + k + 2) * base)
        }
        FamilyShape::Type10 => {
            let num = p(m + k + 2) - p(m + k) + p(k) + &q - &one;
            num / (p(m + k + 1) * base)
        }
    }
}

/// `1 / (q - 1)`, the value of `1^∞`.
pub fn domain_upper(field: &Field) -> FieldElement {
    let one = FieldElement::one(field);
    one.clone() / (FieldElement::generator(field) - one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::q2;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        parse_word(s).unwrap()
    }

    fn pw(s: &str) -> PeriodicWord {
        PeriodicWord::parse(s).unwrap()
    }

    #[test]
    fn parses_epsilon_two() {
        let e = pw("(01)^2(10)^inf");
        assert_eq!(e.preperiod().digits(), &[0, 1, 0, 1]);
        assert_eq!(e.period().digits(), &[1, 0]);
        assert_eq!(e, PeriodicWord::epsilon(2));
    }

    #[test]
    fn parses_constant_and_canonicalizes() {
        let z = pw("0^inf");
        assert!(z.preperiod().is_empty());
        assert_eq!(z.period().digits(), &[0]);
        let a = pw("0(10)^inf");
        assert!(a.preperiod().is_empty());
        assert_eq!(a.period().digits(), &[0, 1]);
        assert_eq!(pw("(0101)^inf"), pw("(01)^inf"));
        assert_eq!(pw("11(01)^inf"), pw("1(10)^inf"));
    }

    #[test]
    fn parser_errors() {
        assert_eq!(parse_word("()^inf"), Err(WordError::EmptyPeriod));
        assert_eq!(parse_word("01(0^0)^inf"), Err(WordError::EmptyPeriod));
        assert!(matches!(parse_word("012"), Err(WordError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_word("(01"), Err(WordError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_word("0^inf1"), Err(WordError::Syntax { pos: 5, .. })));
        assert!(matches!(parse_word("(0^inf)1"), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("0^x"), Err(WordError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_word(""), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("()"), Err(WordError::Syntax { .. })));
        assert!(matches!(parse_word("1^99999999"), Err(WordError::Syntax { .. })));
    }

    #[test]
    fn whitespace_and_nesting() {
        assert_eq!(w(" ( 0 1 ) ^ 2 (10)^inf"), w("(01)^2(10)^inf"));
        assert_eq!(w("((01)^2(1))^2"), w("0101101011"));
        // whitespace does not end an exponent
        assert_eq!(w("0^2 1"), w("0^21"));
        assert_eq!(w("1^0(0)"), w("0"));
    }

    #[test]
    fn reflect_words() {
        assert_eq!(w("1001").reflect(), w("0110"));
        let r = pw("10(01)(10)^inf").reflect();
        assert_eq!(r, pw("01(10)(01)^inf"));
        assert_eq!(r.value(&q2()).to_decimal(6), "0.602117");
    }

    #[test]
    fn value_examples() {
        let f = q2();
        assert_eq!(pw("1^inf").value(&f), domain_upper(&f));
        assert_eq!(pw("(0110)^inf").value(&f).to_decimal(6), "0.613089");
        assert_eq!(pw("(1001)^inf").value(&f).to_decimal(6), "0.794085");
        assert!(pw("0^inf").value(&f).is_zero());
    }

    // Independent oracle: the sum of the first n digits bounds the value from
    // below, and adding q^-n / (q - 1) bounds it from above. Evaluated with
    // rational enclosures of q, never through the closed form.
    fn partial_sum_bounds(word: &PeriodicWord, n: usize) -> (f64, f64) {
        let f = q2();
        let (qlo, qhi) = FieldElement::generator(&f).enclosure(3);
        let (qlo, qhi) = (qlo.to_string(), qhi.to_string());
        let parse = |s: &str| -> num_rational::BigRational { s.parse().unwrap() };
        let (qlo, qhi) = (parse(&qlo), parse(&qhi));
        let mut lo = num_rational::BigRational::from_integer(0.into());
        let mut hi = lo.clone();
        let mut plo = num_rational::BigRational::from_integer(1.into());
        let mut phi = plo.clone();
        for i in 0..n {
            // q^-i between 1/qhi^i and 1/qlo^i
            plo /= &qhi;
            phi /= &qlo;
            if word.digit_at(i) == 1 {
                lo += &plo;
                hi += &phi;
            }
        }
        let one = num_rational::BigRational::from_integer(1.into());
        let tail = &phi / (&qlo - &one);
        hi += tail;
        use num_traits::ToPrimitive;
        (lo.to_f64().unwrap(), hi.to_f64().unwrap())
    }

    #[test]
    fn value_matches_partial_sum_oracle() {
        let word = pw("01^2(10)^inf");
        let (lo, hi) = partial_sum_bounds(&word, 200);
        assert!(hi - lo < 1e-12);
        // 0.7188948122... from the oracle; frozen.
        assert!((lo - 0.718_894_812_2).abs() < 1e-9);
        let v = word.value(&q2());
        assert_eq!(v.to_decimal(6), "0.718895");
        let x = v.to_f64();
        assert!(lo - 1e-15 <= x && x <= hi + 1e-15);
    }

    #[test]
    fn closed_forms_of_table_entries() {
        let f = q2();
        let c = |m, k, s| closed_form_family(m, k, s, &f).to_decimal(6);
        assert_eq!(c(1, 1, FamilyShape::Type01), "0.670382");
        assert_eq!(c(1, 1, FamilyShape::Type10), "0.805057");
        assert_eq!(c(4, 1, FamilyShape::Type10), "0.628620");
    }

    #[test]
    fn closed_forms_agree_with_direct_values() {
        let f = q2();
        let q_inv = FieldElement::generator(&f).inverse().unwrap();
        for m in 0..=8 {
            for k in 1..=30 {
                for shape in [FamilyShape::Type01, FamilyShape::Type10] {
                    assert_eq!(
                        closed_form_family(m, k, shape, &f),
                        shape.word(m, k).value_with(&q_inv),
                        "m={m} k={k} {shape:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn display_is_compact() {
        assert_eq!(PeriodicWord::epsilon(3).to_string(), "(01)^3(10)^inf");
        assert_eq!(pw("01^2(10)^inf").to_string(), "01^2(10)^inf");
        assert_eq!(pw("0^inf").to_string(), "0^inf");
        assert_eq!(FiniteWord::empty().to_string(), "1^0");
        assert_eq!(FiniteWord::parse("1^0").unwrap(), FiniteWord::empty());
    }

    #[test]
    fn shift_and_prefix() {
        let e = PeriodicWord::epsilon(1);
        assert_eq!(e.shift(), pw("1(10)^inf"));
        assert_eq!(e.shift().shift(), pw("(10)^inf"));
        assert_eq!(pw("(10)^inf").shift(), pw("(01)^inf"));
        assert_eq!(e.prefix(5).digits(), &[0, 1, 1, 0, 1]);
    }

    fn arb_finite(max: usize) -> impl Strategy<Value = FiniteWord> {
        prop::collection::vec(0u8..=1, 0..max).prop_map(|v| FiniteWord::new(v).unwrap())
    }

    fn arb_periodic() -> impl Strategy<Value = PeriodicWord> {
        (arb_finite(8), prop::collection::vec(0u8..=1, 1..6))
            .prop_map(|(pre, per)| PeriodicWord::new(pre, FiniteWord::new(per).unwrap()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reflection_identity(word in arb_periodic()) {
            let f = q2();
            prop_assert_eq!(word.reflect().value(&f), domain_upper(&f) - word.value(&f));
            prop_assert_eq!(word.reflect().reflect(), word);
        }

        #[test]
        fn canonicalization_is_sound(pre in arb_finite(6), per in prop::collection::vec(0u8..=1, 1..5), reps in 1usize..3, unroll in 0usize..4) {
            let f = q2();
            let per = FiniteWord::new(per).unwrap();
            // Unroll the period into the preperiod and repeat it: same sequence.
            let raw_pre = pre.concat(&per.repeat(unroll));
            let raw = PeriodicWord::new(raw_pre, per.repeat(reps)).unwrap();
            let plain = PeriodicWord::new(pre, per).unwrap();
            prop_assert_eq!(&raw, &plain);
            prop_assert_eq!(PeriodicWord::new(raw.preperiod().clone(), raw.period().clone()).unwrap(), raw.clone());
            for i in 0..40 {
                prop_assert_eq!(raw.digit_at(i), plain.digit_at(i));
            }
            prop_assert_eq!(raw.value(&f), plain.value(&f));
        }

        #[test]
        fn format_reparses(word in arb_periodic(), fin in arb_finite(12)) {
            prop_assert_eq!(PeriodicWord::parse(&word.to_string()).unwrap(), word);
            prop_assert_eq!(FiniteWord::parse(&fin.to_string()).unwrap(), fin);
        }
    }
}
