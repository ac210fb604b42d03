use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use super::poly::{isolate_root, RatPoly};
use super::AlgebraError;

/// Shared handle to a field description.
pub type Field = Arc<FieldSpec>;

const REFINE_LEVELS: usize = 20;
const BASE_BISECTIONS: usize = 32;

/// `[lo / scale, hi / scale]` with integer endpoints.
#[derive(Clone, Debug)]
struct ScaledInterval {
    lo: BigInt,
    hi: BigInt,
    scale: BigInt,
}

/// The number field ℚ(q) for a designated real root q of an integer
/// polynomial, with the root pinned down by an isolating interval.
///
/// The polynomial is assumed irreducible over ℚ. Sign determination only
/// terminates under that assumption: a nonzero element of a quotient by a
/// reducible polynomial can vanish at the root.
pub struct FieldSpec {
    name: String,
    minpoly: Vec<BigInt>,
    poly: RatPoly,
    isolating: (BigRational, BigRational),
    // q^(d+i) = reduction[i] / reduction_den for i in 0..d-1
    reduction: Vec<Vec<BigInt>>,
    reduction_den: BigInt,
    levels: Vec<OnceLock<ScaledInterval>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("name", &self.name)
            .field("minpoly", &self.minpoly)
            .field("isolating", &self.isolating)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.isolating == other.isolating
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds a field from a polynomial (coefficients lowest degree first) and
    /// an interval whose endpoints have strictly opposite polynomial signs.
    pub fn new(
        name: impl Into<String>,
        minpoly: Vec<BigInt>,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Field, AlgebraError> {
        let poly = RatPoly::from_ints(&minpoly);
        let degree = poly.degree().unwrap_or(0);
        if degree == 0 {
            return Err(AlgebraError::ConstantPolynomial);
        }
        let (s_lo, s_hi) = (poly.sign_at(&lo), poly.sign_at(&hi));
        if lo >= hi || s_lo == Ordering::Equal || s_hi == Ordering::Equal || s_lo == s_hi {
            return Err(AlgebraError::NotIsolating);
        }
        let mut minpoly = minpoly;
        minpoly.truncate(degree + 1);

        let mut powers = Vec::with_capacity(degree.saturating_sub(1));
        let mut cur = RatPoly::new(vec![BigRational::one()]);
        let x = RatPoly::new(vec![BigRational::zero(), BigRational::one()]);
        for _ in 0..degree {
            cur = cur.mul(&x);
        }
        for _ in 0..degree.saturating_sub(1) {
            let r = cur.div_rem(&poly).1;
            powers.push(r.clone());
            cur = r.mul(&x);
        }
        let reduction_den = powers
            .iter()
            .flat_map(|p| p.coeffs().iter().map(|c| c.denom().clone()))
            .fold(BigInt::one(), |acc, d| acc.lcm(&d));
        let reduction = powers
            .iter()
            .map(|p| {
                (0..degree)
                    .map(|i| {
                        p.coeffs()
                            .get(i)
                            .map(|c| (c * BigRational::from_integer(reduction_den.clone())).to_integer())
                            .unwrap_or_default()
                    })
                    .collect()
            })
            .collect();

        Ok(Arc::new(FieldSpec {
            name: name.into(),
            minpoly,
            poly,
            isolating: (lo, hi),
            reduction,
            reduction_den,
            levels: (0..REFINE_LEVELS).map(|_| OnceLock::new()).collect(),
        }))
    }

    /// Builds a field whose generator is the unique root of `minpoly` in
    /// `search_range`.
    pub fn from_search(
        name: impl Into<String>,
        minpoly: Vec<BigInt>,
        search_range: (&BigRational, &BigRational),
    ) -> Result<Field, AlgebraError> {
        let (lo, hi) = isolate_root(&minpoly, search_range)?;
        Self::new(name, minpoly, lo, hi)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn isolating_interval(&self) -> (&BigRational, &BigRational) {
        (&self.isolating.0, &self.isolating.1)
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    /// An interval around the root of width at most
    /// `(hi - lo) * 2^-(32 * 2^level)`.
    fn level(&self, level: usize) -> ScaledInterval {
        if let Some(cell) = self.levels.get(level) {
            return cell.get_or_init(|| self.compute_level(level)).clone();
        }
        self.compute_level(level)
    }

    fn compute_level(&self, level: usize) -> ScaledInterval {
        let (start, steps) = if level == 0 {
            let (lo, hi) = &self.isolating;
            let den = lo.denom().lcm(hi.denom());
            let scale = BigRational::from_integer(den.clone());
            let start = ScaledInterval {
                lo: (lo * &scale).to_integer(),
                hi: (hi * &scale).to_integer(),
                scale: den,
            };
            (start, BASE_BISECTIONS)
        } else {
            (self.level(level - 1), BASE_BISECTIONS << (level - 1))
        };
        self.bisect(start, steps)
    }

    fn bisect(&self, mut iv: ScaledInterval, steps: usize) -> ScaledInterval {
        if iv.lo == iv.hi {
            return iv;
        }
        let s_lo = self.minpoly_sign(&iv.lo, &iv.scale);
        for _ in 0..steps {
            iv.lo <<= 1;
            iv.hi <<= 1;
            iv.scale <<= 1;
            let mid: BigInt = (&iv.lo + &iv.hi) >> 1;
            let s = self.minpoly_sign(&mid, &iv.scale);
            if s == Sign::NoSign {
                return ScaledInterval {
                    lo: mid.clone(),
                    hi: mid,
                    scale: iv.scale,
                };
            }
            if s == s_lo {
                iv.lo = mid;
            } else {
                iv.hi = mid;
            }
        }
        iv
    }

    // Sign of minpoly(x / scale) for scale > 0.
    fn minpoly_sign(&self, x: &BigInt, scale: &BigInt) -> Sign {
        let n = self.degree();
        let mut acc = self.minpoly[n].clone();
        let mut spow = BigInt::one();
        for i in (0..n).rev() {
            spow *= scale;
            acc = acc * x + &self.minpoly[i] * &spow;
        }
        acc.sign()
    }

    fn check_same(self: &Field, other: &Field) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(self, other) || **self == **other {
            Ok(())
        } else {
            Err(AlgebraError::FieldMismatch)
        }
    }
}

/// An exact element of ℚ(q) in the power basis `1, q, …, q^(d-1)`.
///
/// Stored as integer numerators over one positive common denominator in
/// lowest terms, so coefficientwise equality is structural equality.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    num: Vec<BigInt>,
    den: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    fn from_parts(field: Field, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut e = FieldElement { field, num, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let g = self.num.iter().fold(self.den.clone(), |g, c| g.gcd(c));
        if !g.is_one() && !g.is_zero() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Field, n: impl Into<BigInt>) -> Self {
        Self::from_rational(field, BigRational::from_integer(n.into()))
    }

    pub fn from_rational(field: &Field, r: BigRational) -> Self {
        let mut num = vec![BigInt::zero(); field.degree()];
        num[0] = r.numer().clone();
        Self::from_parts(field.clone(), num, r.denom().clone())
    }

    /// The generator q.
    pub fn generator(field: &Field) -> Self {
        if field.degree() == 1 {
            // q = -m0 / m1
            let r = BigRational::new(-field.minpoly[0].clone(), field.minpoly[1].clone());
            return Self::from_rational(field, r);
        }
        let mut num = vec![BigInt::zero(); field.degree()];
        num[1] = BigInt::one();
        Self::from_parts(field.clone(), num, BigInt::one())
    }

    /// Element with the given power-basis coefficients; missing trailing
    /// coefficients are zero.
    pub fn from_coeffs(field: &Field, coeffs: &[BigRational]) -> Result<Self, AlgebraError> {
        let d = field.degree();
        if coeffs.len() > d {
            return Err(AlgebraError::TooManyCoefficients {
                got: coeffs.len(),
                degree: d,
            });
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut num = vec![BigInt::zero(); d];
        for (slot, c) in num.iter_mut().zip(coeffs) {
            *slot = c.numer() * (&den / c.denom());
        }
        Ok(Self::from_parts(field.clone(), num, den))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self, AlgebraError> {
        self.field.check_same(&other.field)?;
        Ok(match op {
            ArithOp::Add => self.add_unchecked(other, false),
            ArithOp::Sub => self.add_unchecked(other, true),
            ArithOp::Mul => self.mul_unchecked(other),
            ArithOp::Div => self.mul_unchecked(&other.inverse()?),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.arith(other, ArithOp::Div)
    }

    fn add_unchecked(&self, other: &Self, negate: bool) -> Self {
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| {
                let (l, r) = (a * &other.den, b * &self.den);
                if negate {
                    l - r
                } else {
                    l + r
                }
            })
            .collect();
        Self::from_parts(self.field.clone(), num, &self.den * &other.den)
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let d = self.field.degree();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let t = &self.field.reduction_den;
        let mut num: Vec<BigInt> = prod[..d].iter().map(|c| c * t).collect();
        for (i, c) in prod[d..].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, r) in num.iter_mut().zip(&self.field.reduction[i]) {
                *slot += c * r;
            }
        }
        Self::from_parts(self.field.clone(), num, &self.den * &other.den * t)
    }

    pub fn mul_int(&self, n: impl Into<BigInt>) -> Self {
        let n = n.into();
        Self::from_parts(
            self.field.clone(),
            self.num.iter().map(|c| c * &n).collect(),
            self.den.clone(),
        )
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let a = RatPoly::new(self.coeffs());
        let (mut r0, mut r1) = (self.field.poly.clone(), a);
        let (mut s0, mut s1) = (RatPoly::zero(), RatPoly::new(vec![BigRational::one()]));
        while !r1.is_zero() {
            let (quot, rem) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, rem);
            let next = s0.sub(&quot.mul(&s1));
            s0 = std::mem::replace(&mut s1, next);
        }
        if r0.degree() != Some(0) {
            return Err(AlgebraError::ZeroDivisor);
        }
        let c = r0.coeffs()[0].clone();
        let inv: Vec<BigRational> = s0.coeffs().iter().map(|x| x / &c).collect();
        Self::from_coeffs(&self.field, &inv)
    }

    /// Integer power; negative exponents need an invertible element.
    pub fn pow(&self, exp: i64) -> Result<Self, AlgebraError> {
        let mut base = if exp < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    // Interval enclosure of the numerator polynomial at the root, scaled by
    // scale^(d-1); returns (lo, hi, scale^(d-1)).
    fn enclose(&self, level: usize) -> (BigInt, BigInt, BigInt) {
        let iv = self.field.level(level);
        let d = self.field.degree();
        let mut lo = self.num[d - 1].clone();
        let mut hi = lo.clone();
        let mut spow = BigInt::one();
        for i in (0..d - 1).rev() {
            spow *= &iv.scale;
            let products = [&lo * &iv.lo, &lo * &iv.hi, &hi * &iv.lo, &hi * &iv.hi];
            let min = products.iter().min().unwrap().clone();
            let max = products.iter().max().unwrap().clone();
            let shift = &self.num[i] * &spow;
            lo = min + &shift;
            hi = max + shift;
        }
        (lo, hi, spow)
    }

    /// Exact sign, -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        if let Some(r) = self.as_rational() {
            return sign_of(r.numer());
        }
        for level in 0.. {
            assert!(
                level < 4 * REFINE_LEVELS,
                "sign refinement did not terminate; is the minimal polynomial of {} irreducible?",
                self.field.name
            );
            let (lo, hi, _) = self.enclose(level);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
        }
        unreachable!()
    }

    /// Exact comparison. Panics if the fields differ.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        self.field
            .check_same(&other.field)
            .expect("comparison across fields");
        match self.add_unchecked(other, true).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Correctly rounded decimal with `digits` fractional digits, ties to
    /// even.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten_pow = BigInt::from(10).pow(digits as u32);
        let scaled = if let Some(r) = self.as_rational() {
            round_half_even(&(r.numer() * &ten_pow), r.denom())
        } else {
            let mut level = 0;
            loop {
                let (lo, hi, spow) = self.enclose(level);
                let den = &spow * &self.den;
                let a = round_half_even(&(lo * &ten_pow), &den);
                let b = round_half_even(&(hi * &ten_pow), &den);
                if a == b {
                    break a;
                }
                level += 1;
                assert!(level < 4 * REFINE_LEVELS, "decimal refinement did not terminate");
            }
        };
        format_scaled(&scaled, digits)
    }

    /// Floating approximation, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.to_decimal(17).parse().unwrap_or(f64::NAN)
    }

    /// Rational enclosure of the value at refinement `level`.
    pub fn enclosure(&self, level: usize) -> (BigRational, BigRational) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r);
        }
        let (lo, hi, spow) = self.enclose(level);
        let den = spow * &self.den;
        (
            BigRational::new(lo, den.clone()),
            BigRational::new(hi, den),
        )
    }

    /// Coefficients as strings such as `"-3/2"`.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(ToString::to_string).collect()
    }
}

fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

// round(n / d) with ties to even; d > 0.
fn round_half_even(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    let twice: BigInt = &r << 1;
    match twice.cmp(d) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

fn format_scaled(scaled: &BigInt, digits: usize) -> String {
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den && *self.field == *other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.field.check_same(&other.field).ok()?;
        Some(self.cmp_exact(other))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({} ≈ {})", self, self.to_decimal(8))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{c}"),
                1 => format!("({c})*q"),
                _ => format!("({c})*q^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.field
                    .check_same(&rhs.field)
                    .expect("arithmetic across fields");
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &FieldElement, b| a.add_unchecked(b, false));
forward_binop!(Sub, sub, |a: &FieldElement, b| a.add_unchecked(b, true));
forward_binop!(Mul, mul, |a: &FieldElement, b| a.mul_unchecked(b));
// Panics on a zero divisor, like integer division.
forward_binop!(Div, div, |a: &FieldElement, b: &FieldElement| a
    .mul_unchecked(&b.inverse().expect("division by zero")));

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
