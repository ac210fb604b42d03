//! Dense univariate polynomials over the rationals and real-root isolation by
//! Sturm sequences.
//!
//! Coefficients are stored lowest degree first and kept trimmed so that the
//! last entry, when present, is nonzero. The zero polynomial is the empty
//! vector.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;

use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        self.eval(x).cmp(&BigRational::zero())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        RatPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        Self::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            if !c.is_zero() {
                let shift = top - dd;
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[shift + j] -= &c * d;
                }
                quot[shift] = c;
            }
            rem.pop();
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let l = l.clone();
                RatPoly {
                    coeffs: self.coeffs.iter().map(|c| c / &l).collect(),
                }
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The polynomial with the same roots, each of multiplicity one.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    /// Removes the linear factor `x - r`; `r` must be a root.
    fn deflate(&self, r: &BigRational) -> Self {
        let lin = RatPoly::new(vec![-r.clone(), BigRational::one()]);
        let (q, rem) = self.div_rem(&lin);
        debug_assert!(rem.is_zero());
        q
    }
}

/// Sturm chain of a polynomial: p, p', then negated remainders.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<RatPoly>,
}

impl SturmChain {
    pub fn new(p: &RatPoly) -> Self {
        let mut chain = vec![p.clone()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(d);
            loop {
                let n = chain.len();
                let r = chain[n - 2].div_rem(&chain[n - 1]).1;
                if r.is_zero() {
                    break;
                }
                chain.push(r.neg());
            }
        }
        SturmChain { chain }
    }

    pub fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(a, b]`; `a` must not be a root.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Location of one real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLocation {
    /// The root is this rational number.
    Exact(BigRational),
    /// The open interval holds exactly one root and the polynomial has
    /// strictly opposite signs at its endpoints.
    Isolated(BigRational, BigRational),
}

impl RootLocation {
    pub fn contains(&self, x: &BigRational) -> bool {
        match self {
            RootLocation::Exact(r) => r == x,
            RootLocation::Isolated(lo, hi) => lo < x && x < hi,
        }
    }
}

/// Isolates every distinct real root of `p` in the closed interval `[lo, hi]`,
/// in increasing order.
pub fn isolate_all_roots(p: &RatPoly, lo: &BigRational, hi: &BigRational) -> Vec<RootLocation> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 || lo > hi {
        return out;
    }
    let mut sf = p.squarefree();
    let mut exact = Vec::new();
    for end in [lo, hi] {
        if sf.eval(end).is_zero() {
            exact.push(end.clone());
            sf = sf.deflate(end);
        }
    }
    exact.dedup();
    isolate_open(&sf, lo.clone(), hi.clone(), &mut out);
    out.extend(exact.into_iter().map(RootLocation::Exact));
    out.sort_by(|a, b| root_lower(a).cmp(root_lower(b)));
    out
}

fn root_lower(r: &RootLocation) -> &BigRational {
    match r {
        RootLocation::Exact(x) => x,
        RootLocation::Isolated(lo, _) => lo,
    }
}

// Roots strictly inside (lo, hi); neither endpoint is a root of `p`.
fn isolate_open(p: &RatPoly, lo: BigRational, hi: BigRational, out: &mut Vec<RootLocation>) {
    if p.degree().unwrap_or(0) == 0 {
        return;
    }
    let chain = SturmChain::new(p);
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        match chain.count(&a, &b) {
            0 => {}
            1 => out.push(RootLocation::Isolated(a, b)),
            _ => {
                let mid = (&a + &b) / BigRational::from_integer(2.into());
                if p.eval(&mid).is_zero() {
                    out.push(RootLocation::Exact(mid.clone()));
                    let rest = p.deflate(&mid);
                    isolate_open(&rest, a, mid.clone(), out);
                    isolate_open(&rest, mid, b, out);
                    // `rest` covers both halves; drop what remains of this chain.
                    continue;
                }
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
}

/// Isolates the unique real root of an integer polynomial inside
/// `search_range` (closed). The returned interval has strictly opposite
/// polynomial signs at its endpoints and contains exactly one real root.
pub fn isolate_root(
    minpoly: &[BigInt],
    search_range: (&BigRational, &BigRational),
) -> Result<(BigRational, BigRational), AlgebraError> {
    let p = RatPoly::from_ints(minpoly);
    if p.degree().unwrap_or(0) == 0 {
        return Err(AlgebraError::ConstantPolynomial);
    }
    let (lo, hi) = search_range;
    let roots = isolate_all_roots(&p, lo, hi);
    match roots.len() {
        0 => Err(AlgebraError::NoRoot),
        1 => Ok(match roots.into_iter().next().unwrap() {
            RootLocation::Isolated(a, b) => (a, b),
            RootLocation::Exact(r) => widen_exact_root(&p.squarefree(), &r),
        }),
        n => Err(AlgebraError::Ambiguous { count: n }),
    }
}

// A sign-changing interval around a rational root of a squarefree polynomial.
fn widen_exact_root(p: &RatPoly, r: &BigRational) -> (BigRational, BigRational) {
    let chain = SturmChain::new(p);
    let mut delta = BigRational::one();
    loop {
        let a = r - &delta;
        let b = r + &delta;
        let sa = p.sign_at(&a);
        let sb = p.sign_at(&b);
        if sa != Ordering::Equal && sb != Ordering::Equal && sa != sb && chain.count(&a, &b) == 1 {
            return (a, b);
        }
        delta /= BigRational::from_integer(2.into());
    }
}

/// Refines an isolating interval by bisection until its width is at most
/// `width`.
pub fn refine_root(
    p: &RatPoly,
    mut lo: BigRational,
    mut hi: BigRational,
    width: &BigRational,
) -> (BigRational, BigRational) {
    let s_lo = p.sign_at(&lo);
    let two = BigRational::from_integer(2.into());
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let s = p.sign_at(&mid);
        if s == Ordering::Equal {
            return (mid.clone(), mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Orders two roots given by (polynomial, isolating interval) pairs by
/// refining both intervals until they separate. Returns `None` when they are
/// still overlapping after `max_bisections` steps.
pub fn compare_roots(
    a: (&RatPoly, &BigRational, &BigRational),
    b: (&RatPoly, &BigRational, &BigRational),
    max_bisections: usize,
) -> Option<Ordering> {
    let (pa, mut alo, mut ahi) = (a.0, a.1.clone(), a.2.clone());
    let (pb, mut blo, mut bhi) = (b.0, b.1.clone(), b.2.clone());
    for _ in 0..=max_bisections {
        if ahi < blo || (ahi == blo && alo < ahi) {
            return Some(Ordering::Less);
        }
        if bhi < alo || (bhi == alo && blo < bhi) {
            return Some(Ordering::Greater);
        }
        if alo == ahi && blo == bhi && alo == blo {
            return Some(Ordering::Equal);
        }
        let wa = (&ahi - &alo) / BigRational::from_integer(2.into());
        let wb = (&bhi - &blo) / BigRational::from_integer(2.into());
        (alo, ahi) = refine_root(pa, alo, ahi, &wa);
        (blo, bhi) = refine_root(pb, blo, bhi, &wb);
    }
    None
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
