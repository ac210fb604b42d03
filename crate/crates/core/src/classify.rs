//! Membership and classification at q₂.
//!
//! Points with finitely many expansions are exactly those with one or two,
//! and both sets have explicit descriptions: the unique-expansion points
//! `0^k(10)^∞`, `1^k(01)^∞`, `0^∞`, `1^∞`, and the two-expansion families
//! `0^m ε_k`, `1^m ε_k` with their reflections. Every membership query is
//! answered twice, once by following the forced orbit and once by locating
//! the point in the explicit families; disagreement is reported as
//! [`ClassifyError::Discrepancy`].

use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};
use thiserror::Error;

use crate::algebraic::FieldElement;
use crate::dynamics::{CountResult, DynamicsError, MapOrder, SearchLimits, SystemContext};
use crate::words::{FamilyShape, FiniteWord, PeriodicWord};

const MAX_FORCED_STEPS: usize = 4096;
const MAX_FAMILY_INDEX: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("dynamics and family routes disagree: {0}")]
    Discrepancy(String),
    #[error("undecided: {0}")]
    Inconclusive(String),
    #[error("point lies outside J")]
    NotInJ,
    #[error("no escape word of length at most {0}")]
    NotFound(usize),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// `k ↦ base + slope · q^(-step·k)` for `k ≥ start`.
///
/// Strictly monotone with limit `base` whenever `slope ≠ 0`: decreasing for
/// positive slope, increasing for negative.
#[derive(Clone, Debug)]
pub struct GeometricFamily {
    base: FieldElement,
    slope: FieldElement,
    ratio: FieldElement,
    start: usize,
}

/// Position of a point relative to a [`GeometricFamily`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Located {
    Equal(usize),
    /// Strictly between the values at two consecutive indices.
    Between(usize, usize),
    /// On the far side of the first value.
    BeforeFirst,
    /// At or beyond the limit.
    PastLimit,
}

impl GeometricFamily {
    pub fn new(ctx: &SystemContext, base: FieldElement, slope: FieldElement, step: i64, start: usize) -> Self {
        assert!(!slope.is_zero(), "constant family");
        GeometricFamily {
            base,
            slope,
            ratio: ctx.q_inv().pow(step).unwrap(),
            start,
        }
    }

    /// `prefix ε_k`, k ≥ 1.
    pub fn epsilon(ctx: &SystemContext, prefix: &FiniteWord) -> Self {
        let tail01 = ctx.value(&PeriodicWord::parse("(01)^inf").unwrap());
        let tail10 = ctx.value(&PeriodicWord::parse("(10)^inf").unwrap());
        let shift = ctx.q_inv().pow(prefix.len() as i64).unwrap();
        let base = ctx.value(&PeriodicWord::new(prefix.clone(), FiniteWord::parse("01").unwrap()).unwrap());
        Self::new(ctx, base, shift * (tail10 - tail01), 2, 1)
    }

    /// `0^k (10)^∞`, k ≥ 0.
    pub fn zeros_then_ten(ctx: &SystemContext) -> Self {
        let tail10 = ctx.value(&PeriodicWord::parse("(10)^inf").unwrap());
        Self::new(ctx, ctx.zero(), tail10, 1, 0)
    }

    pub fn value(&self, k: usize) -> FieldElement {
        &self.base + &self.slope * self.ratio.pow(k as i64).unwrap()
    }

    pub fn limit(&self) -> &FieldElement {
        &self.base
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_decreasing(&self) -> bool {
        self.slope.sign() > 0
    }

    /// Locates x by exponential search then bisection, using only exact
    /// comparisons.
    pub fn locate(&self, x: &FieldElement) -> Result<Located, ClassifyError> {
        let decreasing = self.is_decreasing();
        // Greater: the family value comes before x along the sequence.
        let cmp = |v: &FieldElement| {
            if decreasing {
                v.cmp_exact(x)
            } else {
                x.cmp_exact(v)
            }
        };
        if cmp(&self.base) != Ordering::Less {
            return Ok(Located::PastLimit);
        }
        match cmp(&self.value(self.start)) {
            Ordering::Less => return Ok(Located::BeforeFirst),
            Ordering::Equal => return Ok(Located::Equal(self.start)),
            Ordering::Greater => {}
        }
        let (mut lo, mut hi) = (self.start, self.start + 1);
        loop {
            match cmp(&self.value(hi)) {
                Ordering::Equal => return Ok(Located::Equal(hi)),
                Ordering::Less => break,
                Ordering::Greater => {
                    lo = hi;
                    hi = self.start + 2 * (hi - self.start);
                    if hi > MAX_FAMILY_INDEX {
                        return Err(ClassifyError::Inconclusive(format!(
                            "family index exceeds {MAX_FAMILY_INDEX}"
                        )));
                    }
                }
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match cmp(&self.value(mid)) {
                Ordering::Equal => return Ok(Located::Equal(mid)),
                Ordering::Greater => lo = mid,
                Ordering::Less => hi = mid,
            }
        }
        Ok(Located::Between(lo, hi))
    }
}

/// Named point families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `01^(m+1) ε_k`
    Type01,
    /// `10^m ε_k`
    Type10,
    /// `01^m (10)^∞`
    Limit,
    /// `0^m ε_k`, two expansions.
    ZerosEps,
    /// `1^m ε_k`, two expansions.
    OnesEps,
    /// `0^k (10)^∞`, unique expansion.
    ZerosTen,
}

impl Family {
    fn prefix(self, m: usize) -> FiniteWord {
        match self {
            Family::Type01 => FiniteWord::run(0, 1).concat(&FiniteWord::run(1, m + 1)),
            Family::Type10 => FiniteWord::run(1, 1).concat(&FiniteWord::run(0, m)),
            Family::Limit => FiniteWord::run(0, 1).concat(&FiniteWord::run(1, m)),
            Family::ZerosEps => FiniteWord::run(0, m),
            Family::OnesEps => FiniteWord::run(1, m),
            Family::ZerosTen => FiniteWord::empty(),
        }
    }

    /// The unreflected word for parameters (m, k).
    pub fn word(self, m: usize, k: Option<usize>) -> PeriodicWord {
        let ten = FiniteWord::parse("10").unwrap();
        match (self, k) {
            (Family::Type01, Some(k)) => FamilyShape::Type01.word(m, k),
            (Family::Type10, Some(k)) => FamilyShape::Type10.word(m, k),
            (Family::Limit, _) => PeriodicWord::new(self.prefix(m), ten).unwrap(),
            (Family::ZerosTen, Some(k)) => PeriodicWord::new(FiniteWord::run(0, k), ten).unwrap(),
            (Family::ZerosEps | Family::OnesEps, Some(k)) => {
                PeriodicWord::epsilon(k).prepend(&self.prefix(m))
            }
            _ => panic!("{self:?} needs an index k"),
        }
    }

    /// The k-indexed sequence for fixed m.
    pub fn geometric(self, ctx: &SystemContext, m: usize) -> GeometricFamily {
        match self {
            Family::ZerosTen => GeometricFamily::zeros_then_ten(ctx),
            Family::Limit => panic!("the limit family has a single member"),
            _ => GeometricFamily::epsilon(ctx, &self.prefix(m)),
        }
    }

    fn describe(self, m: usize, k: Option<usize>) -> String {
        let k = k.map(|k| k.to_string()).unwrap_or_else(|| "k".into());
        match self {
            Family::Type01 => format!("01^{} e_{k}", m + 1),
            Family::Type10 => format!("10^{m} e_{k}"),
            Family::Limit => format!("01^{m} (10)^inf"),
            Family::ZerosEps => format!("0^{m} e_{k}"),
            Family::OnesEps => format!("1^{m} e_{k}"),
            Family::ZerosTen => format!("0^{k} (10)^inf"),
        }
    }
}

/// A member of a named family, with its word and exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyPoint {
    pub family: Family,
    pub m: usize,
    pub k: Option<usize>,
    pub reflected: bool,
    pub word: PeriodicWord,
    pub value: FieldElement,
}

impl FamilyPoint {
    pub fn new(ctx: &SystemContext, family: Family, m: usize, k: Option<usize>, reflected: bool) -> Self {
        let base = family.word(m, k);
        let word = if reflected { base.reflect() } else { base };
        FamilyPoint {
            value: ctx.value(&word),
            family,
            m,
            k,
            reflected,
            word,
        }
    }

    /// The reflected point `1/(q-1) - value`.
    pub fn mirror(&self, ctx: &SystemContext) -> Self {
        Self::new(ctx, self.family, self.m, self.k, !self.reflected)
    }

    /// Index of the E-family the point belongs to, if any.
    pub fn e_index(&self) -> Option<usize> {
        matches!(self.family, Family::Type01 | Family::Type10 | Family::Limit).then_some(self.m)
    }

    pub fn label(&self) -> String {
        let base = self.family.describe(self.m, self.k);
        if self.reflected {
            format!("reflect({base})")
        } else {
            base
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label(),
            "family": self.family,
            "m": self.m,
            "k": self.k,
            "reflected": self.reflected,
            "word": self.word.to_string(),
            "decimal": self.value.to_decimal(20),
        })
    }
}

impl fmt::Display for FamilyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Finite or infinite expansion count, as decided at q₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionCount {
    Unique(PeriodicWord),
    Two([PeriodicWord; 2]),
    Infinite,
}

impl ExpansionCount {
    pub fn is_finite(&self) -> bool {
        !matches!(self, ExpansionCount::Infinite)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExpansionCount::Unique(_) => "unique",
            ExpansionCount::Two(_) => "two",
            ExpansionCount::Infinite => "infinite",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ExpansionCount::Unique(w) => json!({"count": 1, "expansions": [w.to_string()]}),
            ExpansionCount::Two([a, b]) => {
                json!({"count": 2, "expansions": [a.to_string(), b.to_string()]})
            }
            ExpansionCount::Infinite => json!({"count": "infinite"}),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BranchKind {
    A1,
    A2,
    A3,
    NotInSwitch,
}

/// Count of one digit image `T_s(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageEvidence {
    pub digit: u8,
    pub value: FieldElement,
    pub count: ExpansionCount,
    /// Recurrent in-switch cycle certifying an infinite count, when searched for.
    pub witness: Option<CountResult>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchClass {
    pub kind: BranchKind,
    pub evidence: Vec<ImageEvidence>,
}

impl BranchClass {
    pub fn to_json(&self, ctx: &SystemContext) -> Value {
        json!({
            "kind": self.kind,
            "images": self.evidence.iter().map(|e| json!({
                "digit": e.digit,
                "decimal": e.value.to_decimal(20),
                "expansions": e.count.to_json(),
                "witness": e.witness.as_ref().map(|w| w.to_json(ctx)),
            })).collect::<Vec<_>>(),
        })
    }
}

/// One of the eight closed intervals covering `A₂ ∩ J`.
#[derive(Clone, Debug)]
pub struct HInterval {
    pub m: usize,
    /// 0: `[reflect(10^m ε_1), 01^(m+1) ε_1]`; 1: `[reflect(01^(m+1) ε_1), 10^m ε_1]`.
    pub column: usize,
    pub lo: FieldElement,
    pub hi: FieldElement,
}

impl HInterval {
    pub fn contains(&self, x: &FieldElement) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// J and the cover H.
#[derive(Clone, Debug)]
pub struct RegionTable {
    pub j_lo: FieldElement,
    pub j_hi: FieldElement,
    pub intervals: Vec<HInterval>,
}

impl RegionTable {
    pub fn in_j(&self, x: &FieldElement) -> bool {
        &self.j_lo <= x && x <= &self.j_hi
    }

    pub fn in_h(&self, x: &FieldElement) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn interval(&self, m: usize, column: usize) -> &HInterval {
        self.intervals
            .iter()
            .find(|i| i.m == m && i.column == column)
            .expect("m in 1..=4, column in 0..=1")
    }

    /// Indices of the intervals containing x.
    pub fn containing(&self, x: &FieldElement) -> Vec<usize> {
        (0..self.intervals.len())
            .filter(|&i| self.intervals[i].contains(x))
            .collect()
    }

    /// Intervals poking out of J, as (m, column).
    pub fn outside_j(&self) -> Vec<(usize, usize)> {
        self.intervals
            .iter()
            .filter(|i| !self.in_j(&i.lo) || !self.in_j(&i.hi))
            .map(|i| (i.m, i.column))
            .collect()
    }

    /// Aligned text table, six decimals per endpoint.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<3}{:<28}[~(01^(m+1) e1), (10^m e1)]",
            "m", "[~(10^m e1), (01^(m+1) e1)]"
        );
        for m in 1..=4 {
            let cell = |c| {
                let i = self.interval(m, c);
                format!("[{}, {}]", i.lo.to_decimal(6), i.hi.to_decimal(6))
            };
            let _ = writeln!(out, "{:<3}{:<28}{}", m, cell(0), cell(1));
        }
        let _ = writeln!(
            out,
            "J = [{}, {}]",
            self.j_lo.to_decimal(6),
            self.j_hi.to_decimal(6)
        );
        for (m, c) in self.outside_j() {
            let _ = writeln!(out, "note: interval m={m} column {} extends outside J", c + 1);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "J": [self.j_lo.to_decimal(20), self.j_hi.to_decimal(20)],
            "H": self.intervals.iter().map(|i| json!({
                "m": i.m,
                "column": i.column + 1,
                "lo": i.lo.to_decimal(20),
                "hi": i.hi.to_decimal(20),
                "lo_6": i.lo.to_decimal(6),
                "hi_6": i.hi.to_decimal(6),
                "inside_J": self.in_j(&i.lo) && self.in_j(&i.hi),
            })).collect::<Vec<_>>(),
        })
    }
}

/// How one E-family relates to a tested point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordOutcome {
    Equal { k: Option<usize> },
    /// Equal to the excluded point `10 ε_1`.
    Excluded,
    Between { k_lo: usize, k_hi: usize },
    BeforeFirst,
    PastLimit,
    LimitDiffers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRecord {
    pub family: Family,
    pub m: usize,
    pub reflected: bool,
    pub outcome: RecordOutcome,
}

impl FamilyRecord {
    pub fn describe(&self) -> String {
        let name = self.family.describe(self.m, None);
        let name = if self.reflected { format!("reflect({name})") } else { name };
        let what = match &self.outcome {
            RecordOutcome::Equal { k: Some(k) } => format!("equal at k={k}"),
            RecordOutcome::Equal { k: None } => "equal".into(),
            RecordOutcome::Excluded => "equal to the excluded point".into(),
            RecordOutcome::Between { k_lo, k_hi } => {
                format!("strictly between k={k_lo} and k={k_hi}")
            }
            RecordOutcome::BeforeFirst => "beyond the k=1 value".into(),
            RecordOutcome::PastLimit => "beyond the limit".into(),
            RecordOutcome::LimitDiffers => "differs".into(),
        };
        format!("{name}: {what}")
    }
}

/// Exact decision of `x ∈ A₂ ∩ J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A2Decision {
    pub member: Option<FamilyPoint>,
    pub records: Vec<FamilyRecord>,
}

impl A2Decision {
    pub fn is_member(&self) -> bool {
        self.member.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "member": self.member.as_ref().map(|p| p.label()),
            "records": self.records.iter().map(|r| r.describe()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeSource {
    /// The closed-form word known for the point's family.
    Designated,
    /// Breadth-first search over admissible words.
    Search,
}

/// A word steering a point of `A₂ ∩ J` into `J ∖ A₂`.
#[derive(Clone, Debug)]
pub struct EscapeCertificate {
    pub start: FamilyPoint,
    /// In composition order: the rightmost symbol is applied first.
    pub word: FiniteWord,
    pub landing: FieldElement,
    /// `landing` compared with the lower and upper ends of J.
    pub j_cmp: (Ordering, Ordering),
    pub refutation: A2Decision,
    pub source: EscapeSource,
}

impl EscapeCertificate {
    /// Re-checks every claim from scratch.
    pub fn verify(&self, cls: &Classifier) -> bool {
        let ctx = cls.ctx();
        if ctx.value(&self.start.word) != self.start.value {
            return false;
        }
        let Ok(landing) = ctx.apply_word(&self.start.value, &self.word, MapOrder::Composition) else {
            return false;
        };
        landing == self.landing
            && cls.region().in_j(&landing)
            && matches!(cls.a2_member_exact(&landing), Ok(d) if !d.is_member())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start.to_json(),
            "word": self.word.to_string(),
            "order": "composition",
            "source": self.source,
            "landing": self.landing.to_decimal(20),
            "landing_coeffs": self.landing.coeff_strings(),
            "in_J": self.j_cmp.0 != Ordering::Less && self.j_cmp.1 != Ordering::Greater,
            "refutation": self.refutation.to_json(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "point    {} = {}", self.start.label(), self.start.value.to_decimal(12));
        let _ = writeln!(out, "word     {} (rightmost digit first, {:?})", self.word, self.source);
        let _ = writeln!(out, "landing  {}", self.landing.to_decimal(12));
        let _ = writeln!(out, "in J     yes");
        for r in &self.refutation.records {
            let _ = writeln!(out, "  {}", r.describe());
        }
        out
    }
}

enum ForcedEnd {
    Switch(FieldElement),
    Cycle(PeriodicWord),
}

/// Classification engine at q₂.
#[derive(Clone, Debug)]
pub struct Classifier {
    ctx: SystemContext,
    /// `01(10)^∞` and `10(01)^∞`.
    a1: [FieldElement; 2],
    region: RegionTable,
}

impl Default for Classifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Classifier {
    pub fn new() -> Self {
        let ctx = SystemContext::q2();
        let a1 = [
            ctx.value(&PeriodicWord::parse("01(10)^inf").unwrap()),
            ctx.value(&PeriodicWord::parse("10(01)^inf").unwrap()),
        ];
        let (j_lo, j_hi) = ctx.j_interval();
        let mut intervals = Vec::new();
        for m in 1..=4 {
            let p01 = FamilyPoint::new(&ctx, Family::Type01, m, Some(1), false);
            let p10 = FamilyPoint::new(&ctx, Family::Type10, m, Some(1), false);
            intervals.push(HInterval {
                m,
                column: 0,
                lo: ctx.reflect_point(&p10.value),
                hi: p01.value.clone(),
            });
            intervals.push(HInterval {
                m,
                column: 1,
                lo: ctx.reflect_point(&p01.value),
                hi: p10.value,
            });
        }
        let region = RegionTable {
            j_lo,
            j_hi,
            intervals,
        };
        Classifier { ctx, a1, region }
    }

    pub fn ctx(&self) -> &SystemContext {
        &self.ctx
    }

    pub fn a1_points(&self) -> &[FieldElement; 2] {
        &self.a1
    }

    /// J and the eight intervals of H.
    pub fn h_cover(&self) -> RegionTable {
        self.region.clone()
    }

    pub fn region(&self) -> &RegionTable {
        &self.region
    }

    fn forced_orbit(&self, x: &FieldElement) -> Result<(FiniteWord, ForcedEnd), ClassifyError> {
        let mut seen: HashMap<FieldElement, usize> = HashMap::new();
        let mut digits = FiniteWord::empty();
        let mut y = x.clone();
        for step in 0..MAX_FORCED_STEPS {
            if let Some(&i) = seen.get(&y) {
                let d = digits.digits();
                let word = PeriodicWord::new(d[..i].into(), d[i..].into()).unwrap();
                return Ok((digits, ForcedEnd::Cycle(word)));
            }
            let Some(s) = self.ctx.forced_digit(&y) else {
                return Ok((digits, ForcedEnd::Switch(y)));
            };
            seen.insert(y.clone(), step);
            y = self.ctx.apply_digit(&y, s)?;
            digits.push(s);
        }
        Err(ClassifyError::Inconclusive(format!(
            "forced orbit neither cycles nor reaches the switch region in {MAX_FORCED_STEPS} steps"
        )))
    }

    /// Expansions of x from the forced orbit alone.
    fn count_by_dynamics(&self, x: &FieldElement) -> Result<ExpansionCount, ClassifyError> {
        let (digits, end) = self.forced_orbit(x)?;
        match end {
            ForcedEnd::Cycle(word) => Ok(ExpansionCount::Unique(word)),
            ForcedEnd::Switch(v) => {
                let tails = if v == self.a1[0] {
                    ["01(10)^inf", "10^3(01)^inf"]
                } else if v == self.a1[1] {
                    ["10(01)^inf", "01^3(10)^inf"]
                } else {
                    return Ok(ExpansionCount::Infinite);
                };
                let mut pair = tails.map(|t| PeriodicWord::parse(t).unwrap().prepend(&digits));
                pair.sort();
                Ok(ExpansionCount::Two(pair))
            }
        }
    }

    /// Unique-expansion word of x from the explicit list.
    fn m1_by_family(&self, x: &FieldElement) -> Result<Option<PeriodicWord>, ClassifyError> {
        if x.is_zero() {
            return Ok(Some(PeriodicWord::constant(0)));
        }
        if x == self.ctx.domain_hi() {
            return Ok(Some(PeriodicWord::constant(1)));
        }
        let fam = GeometricFamily::zeros_then_ten(&self.ctx);
        for reflected in [false, true] {
            let y = if reflected { self.ctx.reflect_point(x) } else { x.clone() };
            if let Located::Equal(k) = fam.locate(&y)? {
                let w = Family::ZerosTen.word(0, Some(k));
                return Ok(Some(if reflected { w.reflect() } else { w }));
            }
        }
        Ok(None)
    }

    /// The two-expansion family point equal to x, if any.
    pub fn m2_family(&self, x: &FieldElement) -> Result<Option<FamilyPoint>, ClassifyError> {
        for reflected in [false, true] {
            let y = if reflected { self.ctx.reflect_point(x) } else { x.clone() };
            if y.sign() <= 0 || &y >= self.ctx.domain_hi() {
                continue;
            }
            // 0^m ε_k lies in (0^(m+1)(10)^∞, 0^m ε_1], shrinking towards 0.
            for m in 0.. {
                let fam = Family::ZerosEps.geometric(&self.ctx, m);
                match fam.locate(&y)? {
                    Located::Equal(k) => {
                        return Ok(Some(FamilyPoint::new(&self.ctx, Family::ZerosEps, m, Some(k), reflected)))
                    }
                    Located::PastLimit => continue,
                    _ => break,
                }
            }
            // 1^m ε_k lies in (1^m(01)^∞, 1^m ε_1], rising towards 1/(q-1).
            for m in 1.. {
                let fam = Family::OnesEps.geometric(&self.ctx, m);
                if fam.limit() >= &y {
                    break;
                }
                if let Located::Equal(k) = fam.locate(&y)? {
                    return Ok(Some(FamilyPoint::new(&self.ctx, Family::OnesEps, m, Some(k), reflected)));
                }
            }
        }
        Ok(None)
    }

    /// Number of expansions of x, decided by both routes.
    pub fn expansion_count(&self, x: &FieldElement) -> Result<ExpansionCount, ClassifyError> {
        if !self.ctx.in_domain(x) {
            return Err(ClassifyError::Dynamics(DynamicsError::DomainViolation {
                digit: 0,
                bound: "x outside [0, 1/(q-1)]",
                value: x.to_decimal(12),
                applied: 0,
            }));
        }
        let dynamic = self.count_by_dynamics(x)?;
        let unique = self.m1_by_family(x)?;
        let two = self.m2_family(x)?;
        let agree = match (&dynamic, &unique, &two) {
            (ExpansionCount::Unique(w), Some(u), None) => w == u,
            (ExpansionCount::Two(pair), None, Some(p)) => pair.contains(&p.word),
            (ExpansionCount::Infinite, None, None) => true,
            _ => false,
        };
        if !agree {
            return Err(ClassifyError::Discrepancy(format!(
                "x = {}: dynamics says {}, unique-list match {:?}, two-list match {:?}",
                x.to_decimal(12),
                dynamic.label(),
                unique.map(|w| w.to_string()),
                two.map(|p| p.label()),
            )));
        }
        Ok(dynamic)
    }

    /// The expansion of x if it is unique.
    pub fn m1_member(&self, x: &FieldElement) -> Result<Option<PeriodicWord>, ClassifyError> {
        Ok(match self.expansion_count(x)? {
            ExpansionCount::Unique(w) => Some(w),
            _ => None,
        })
    }

    /// Both expansions of x if it has exactly two.
    pub fn m2_member(&self, x: &FieldElement) -> Result<Option<[PeriodicWord; 2]>, ClassifyError> {
        Ok(match self.expansion_count(x)? {
            ExpansionCount::Two(pair) => Some(pair),
            _ => None,
        })
    }

    pub fn branch_class(&self, x: &FieldElement) -> Result<BranchClass, ClassifyError> {
        self.branch_class_with(x, None)
    }

    /// As [`Self::branch_class`], also searching for a recurrent in-switch
    /// cycle under each infinite image.
    pub fn branch_class_with(
        &self,
        x: &FieldElement,
        witness_limits: Option<&SearchLimits>,
    ) -> Result<BranchClass, ClassifyError> {
        if !self.ctx.in_switch(x) {
            return Ok(BranchClass {
                kind: BranchKind::NotInSwitch,
                evidence: Vec::new(),
            });
        }
        let mut evidence = Vec::new();
        for s in [0, 1] {
            let value = self.ctx.apply_digit(x, s)?;
            let count = self.expansion_count(&value)?;
            let witness = match (&count, witness_limits) {
                (ExpansionCount::Infinite, Some(limits)) => {
                    Some(self.ctx.count_expansions(&value, limits))
                }
                _ => None,
            };
            evidence.push(ImageEvidence {
                digit: s,
                value,
                count,
                witness,
            });
        }
        let finite = evidence.iter().filter(|e| e.count.is_finite()).count();
        let kind = match finite {
            2 => BranchKind::A1,
            1 => BranchKind::A2,
            _ => BranchKind::A3,
        };
        Ok(BranchClass { kind, evidence })
    }

    /// `q^(-j) + q^(-k) + q² - q - 2`.
    pub fn a1_equation_value(&self, j: u32, k: u32) -> FieldElement {
        let q = self.ctx.q();
        let qi = self.ctx.q_inv();
        qi.pow(j as i64).unwrap() + qi.pow(k as i64).unwrap() + q * q - q - self.ctx.constant(2)
    }

    /// All `(j, k)` in range at which the equation vanishes exactly.
    pub fn solve_a1_equation(&self, j_max: u32, k_max: u32) -> Vec<(u32, u32)> {
        let qi = self.ctx.q_inv();
        let powers: Vec<FieldElement> = (0..=j_max.max(k_max))
            .map(|e| qi.pow(e as i64).unwrap())
            .collect();
        let q = self.ctx.q();
        let rest = q * q - q - self.ctx.constant(2);
        let mut out = Vec::new();
        for j in 1..=j_max {
            for k in 1..=k_max {
                if (&powers[j as usize] + &powers[k as usize] + &rest).is_zero() {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// The E-family points with `k ≤ k_max`, unreflected then reflected,
    /// without verification.
    pub fn a2_in_j_candidates(&self, k_max: usize) -> Vec<FamilyPoint> {
        let mut base = Vec::new();
        for m in 1..=4 {
            if m % 2 == 0 {
                base.push(FamilyPoint::new(&self.ctx, Family::Limit, m, None, false));
            }
            for k in 1..=k_max {
                base.push(FamilyPoint::new(&self.ctx, Family::Type01, m, Some(k), false));
                if !(m == 1 && k == 1) {
                    base.push(FamilyPoint::new(&self.ctx, Family::Type10, m, Some(k), false));
                }
            }
        }
        let mirrored: Vec<FamilyPoint> = base.iter().map(|p| p.mirror(&self.ctx)).collect();
        base.extend(mirrored);
        base
    }

    /// The members of `A₂ ∩ J` with `k ≤ k_max`, each checked to lie in J and
    /// the switch region and to classify as A2.
    pub fn a2_in_j_members(&self, k_max: usize) -> Result<Vec<FamilyPoint>, ClassifyError> {
        let points = self.a2_in_j_candidates(k_max);
        for p in &points {
            if !self.region.in_j(&p.value) || !self.ctx.in_switch(&p.value) {
                return Err(ClassifyError::Discrepancy(format!(
                    "{} = {} lies outside J or the switch region",
                    p.label(),
                    p.value.to_decimal(12)
                )));
            }
            let class = self.branch_class(&p.value)?;
            if class.kind != BranchKind::A2 {
                return Err(ClassifyError::Discrepancy(format!(
                    "{} classifies as {:?}",
                    p.label(),
                    class.kind
                )));
            }
        }
        Ok(points)
    }

    /// Decides `x ∈ A₂ ∩ J` exactly against the eight families.
    pub fn a2_member_exact(&self, x: &FieldElement) -> Result<A2Decision, ClassifyError> {
        if !self.region.in_j(x) {
            return Err(ClassifyError::NotInJ);
        }
        let mut records = Vec::new();
        let mut member = None;
        for m in 1..=4 {
            for reflected in [false, true] {
                let y = if reflected { self.ctx.reflect_point(x) } else { x.clone() };
                for family in [Family::Type01, Family::Type10] {
                    let outcome = match family.geometric(&self.ctx, m).locate(&y)? {
                        Located::Equal(1) if family == Family::Type10 && m == 1 => {
                            RecordOutcome::Excluded
                        }
                        Located::Equal(k) => {
                            member.get_or_insert_with(|| {
                                FamilyPoint::new(&self.ctx, family, m, Some(k), reflected)
                            });
                            RecordOutcome::Equal { k: Some(k) }
                        }
                        Located::Between(k_lo, k_hi) => RecordOutcome::Between { k_lo, k_hi },
                        Located::BeforeFirst => RecordOutcome::BeforeFirst,
                        Located::PastLimit => RecordOutcome::PastLimit,
                    };
                    records.push(FamilyRecord {
                        family,
                        m,
                        reflected,
                        outcome,
                    });
                }
                if m % 2 == 0 {
                    let limit = self.ctx.value(&Family::Limit.word(m, None));
                    let outcome = if limit == y {
                        member.get_or_insert_with(|| {
                            FamilyPoint::new(&self.ctx, Family::Limit, m, None, reflected)
                        });
                        RecordOutcome::Equal { k: None }
                    } else {
                        RecordOutcome::LimitDiffers
                    };
                    records.push(FamilyRecord {
                        family: Family::Limit,
                        m,
                        reflected,
                        outcome,
                    });
                }
            }
        }
        Ok(A2Decision { member, records })
    }

    /// The closed-form escape word for an unreflected E-family point, in
    /// composition order.
    pub fn designated_word(&self, p: &FamilyPoint) -> Option<FiniteWord> {
        if p.reflected {
            return None;
        }
        let w = |s: &str| FiniteWord::parse(s).unwrap();
        let ten = |n: usize| w("10").repeat(n);
        let word = match (p.family, p.m, p.k) {
            (Family::Type01, 1, Some(k)) => ten(k - 1).concat(&w("0001")),
            (Family::Type01, 2, Some(_)) => w("001"),
            (Family::Type01, 3, Some(k)) => ten(k + 1).concat(&w("01")),
            (Family::Type01, 4, Some(_)) => w("1001"),
            (Family::Type10, 1, Some(k)) if k >= 2 => ten(k - 2).concat(&w("11110")),
            (Family::Type10, 2, Some(_)) => w("110"),
            (Family::Type10, 3, Some(k)) => ten(k).concat(&w("110")),
            (Family::Type10, 4, Some(_)) => w("0110"),
            (Family::Limit, 2, None) => w("001"),
            (Family::Limit, 4, None) => w("1001"),
            _ => return None,
        };
        Some(word)
    }

    fn try_escape(
        &self,
        p: &FamilyPoint,
        word: &FiniteWord,
        source: EscapeSource,
    ) -> Result<Option<EscapeCertificate>, ClassifyError> {
        let Ok(landing) = self.ctx.apply_word(&p.value, word, MapOrder::Composition) else {
            return Ok(None);
        };
        self.certify_landing(p, word, landing, source)
    }

    fn certify_landing(
        &self,
        p: &FamilyPoint,
        word: &FiniteWord,
        landing: FieldElement,
        source: EscapeSource,
    ) -> Result<Option<EscapeCertificate>, ClassifyError> {
        if !self.region.in_j(&landing) {
            return Ok(None);
        }
        let refutation = self.a2_member_exact(&landing)?;
        if refutation.is_member() {
            return Ok(None);
        }
        Ok(Some(EscapeCertificate {
            start: p.clone(),
            word: word.clone(),
            j_cmp: (
                landing.cmp_exact(&self.region.j_lo),
                landing.cmp_exact(&self.region.j_hi),
            ),
            landing,
            refutation,
            source,
        }))
    }

    /// Finds a word steering p into `J ∖ A₂`.
    ///
    /// Reflected points reuse the certificate of their mirror with the word
    /// reflected. Otherwise the designated word is tried first, then all
    /// admissible words by increasing length.
    pub fn escape_search(&self, p: &FamilyPoint, max_len: usize) -> Result<EscapeCertificate, ClassifyError> {
        if p.reflected {
            let mirror = self.escape_search(&p.mirror(&self.ctx), max_len)?;
            let word = mirror.word.reflect();
            let landing = self.ctx.reflect_point(&mirror.landing);
            return self
                .certify_landing(p, &word, landing, mirror.source)?
                .ok_or_else(|| {
                    ClassifyError::Discrepancy(format!(
                        "reflected certificate for {} does not verify",
                        p.label()
                    ))
                });
        }
        if let Some(word) = self.designated_word(p) {
            if let Some(cert) = self.try_escape(p, &word, EscapeSource::Designated)? {
                return Ok(cert);
            }
        }
        // Words are grown by their first-applied digit, so `digits` holds
        // the reverse of the composition-order word.
        let mut seen: HashSet<FieldElement> = HashSet::from([p.value.clone()]);
        let mut queue = VecDeque::from([(p.value.clone(), Vec::<u8>::new())]);
        while let Some((value, digits)) = queue.pop_front() {
            if digits.len() >= max_len {
                continue;
            }
            for s in [0, 1] {
                if !self.ctx.admissible(&value, s) {
                    continue;
                }
                let next = self.ctx.apply_digit(&value, s)?;
                if !seen.insert(next.clone()) {
                    continue;
                }
                let mut applied = digits.clone();
                applied.push(s);
                let word = FiniteWord::new(applied.iter().rev().copied().collect()).unwrap();
                if let Some(cert) = self.certify_landing(p, &word, next.clone(), EscapeSource::Search)? {
                    return Ok(cert);
                }
                queue.push_back((next, applied));
            }
        }
        Err(ClassifyError::NotFound(max_len))
    }
}
