//! The expansion dynamics `T_0(x) = qx` on `[0, 1/(q²-q)]` and
//! `T_1(x) = qx - 1` on `[1/q, 1/(q-1)]`.
//!
//! Every admissible digit sequence from x is a q-expansion of x, so
//! expansions are the infinite paths of the tree obtained by branching at
//! each visit of the switch region `[1/q, 1/(q²-q)]`.

use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

use crate::algebraic::{q2, Field, FieldElement};
use crate::words::{FiniteWord, PeriodicWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("base must lie strictly between 1 and 2 (field {0})")]
    BaseOutOfRange(String),
    #[error("T_{digit} is undefined at x ≈ {value}: {bound} (after {applied} digits)")]
    DomainViolation {
        digit: u8,
        bound: &'static str,
        value: String,
        applied: usize,
    },
}

/// Order in which the symbols of a map word are applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapOrder {
    /// Left to right: `d_1` is applied first.
    Forward,
    /// `T_{d_1} ∘ … ∘ T_{d_n}`: the rightmost symbol is applied first.
    Composition,
}

/// The dynamical system for one base q ∈ (1, 2).
#[derive(Clone, Debug)]
pub struct SystemContext {
    field: Field,
    q: FieldElement,
    q_inv: FieldElement,
    switch_lo: FieldElement,
    switch_hi: FieldElement,
    domain_hi: FieldElement,
}

impl SystemContext {
    pub fn new(field: &Field) -> Result<Self, DynamicsError> {
        let q = FieldElement::generator(field);
        let one = FieldElement::one(field);
        if (&q - &one).sign() <= 0 || (one.mul_int(2) - &q).sign() <= 0 {
            return Err(DynamicsError::BaseOutOfRange(field.name().to_string()));
        }
        let q_inv = q.inverse().expect("q > 1");
        let domain_hi = &one / (&q - &one);
        let switch_hi = &domain_hi * &q_inv;
        Ok(SystemContext {
            field: field.clone(),
            switch_lo: q_inv.clone(),
            q,
            q_inv,
            switch_hi,
            domain_hi,
        })
    }

    /// The system at q₂.
    pub fn q2() -> Self {
        Self::new(&q2()).expect("q2 lies in (1, 2)")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> &FieldElement {
        &self.q
    }

    pub fn q_inv(&self) -> &FieldElement {
        &self.q_inv
    }

    /// `1/q`
    pub fn switch_lo(&self) -> &FieldElement {
        &self.switch_lo
    }

    /// `1/(q² - q)`
    pub fn switch_hi(&self) -> &FieldElement {
        &self.switch_hi
    }

    /// `1/(q - 1)`
    pub fn domain_hi(&self) -> &FieldElement {
        &self.domain_hi
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(&self.field)
    }

    pub fn constant(&self, n: i64) -> FieldElement {
        FieldElement::from_int(&self.field, n)
    }

    pub fn value(&self, word: &PeriodicWord) -> FieldElement {
        word.value_with(&self.q_inv)
    }

    /// `1/(q - 1) - x`, the point whose expansions are the reflections of
    /// those of x.
    pub fn reflect_point(&self, x: &FieldElement) -> FieldElement {
        &self.domain_hi - x
    }

    /// `[(q + q²)/(q⁴ - 1), (1 + q³)/(q⁴ - 1)]`.
    pub fn j_interval(&self) -> (FieldElement, FieldElement) {
        let one = self.constant(1);
        let q2 = &self.q * &self.q;
        let q3 = &q2 * &self.q;
        let den = &q2 * &q2 - &one;
        ((&self.q + &q2) / &den, (one + q3) / den)
    }

    pub fn in_domain(&self, x: &FieldElement) -> bool {
        x.sign() >= 0 && x <= &self.domain_hi
    }

    pub fn in_switch(&self, x: &FieldElement) -> bool {
        &self.switch_lo <= x && x <= &self.switch_hi
    }

    /// The only admissible digit at x, for x in the domain but outside the
    /// switch region.
    pub fn forced_digit(&self, x: &FieldElement) -> Option<u8> {
        if !self.in_domain(x) {
            return None;
        }
        if x < &self.switch_lo {
            Some(0)
        } else if x > &self.switch_hi {
            Some(1)
        } else {
            None
        }
    }

    fn check(&self, x: &FieldElement, s: u8) -> Result<(), (&'static str, u8)> {
        match s {
            0 => {
                if x.sign() < 0 {
                    Err(("x < 0", 0))
                } else if x > &self.switch_hi {
                    Err(("x > 1/(q^2-q)", 0))
                } else {
                    Ok(())
                }
            }
            _ => {
                if x < &self.switch_lo {
                    Err(("x < 1/q", 1))
                } else if x > &self.domain_hi {
                    Err(("x > 1/(q-1)", 1))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn admissible(&self, x: &FieldElement, s: u8) -> bool {
        self.check(x, s).is_ok()
    }

    pub fn apply_digit(&self, x: &FieldElement, s: u8) -> Result<FieldElement, DynamicsError> {
        assert!(s <= 1, "digit must be 0 or 1");
        self.check(x, s)
            .map_err(|(bound, digit)| DynamicsError::DomainViolation {
                digit,
                bound,
                value: x.to_decimal(12),
                applied: 0,
            })?;
        Ok(self.step(x, s))
    }

    // qx - s without domain checks.
    fn step(&self, x: &FieldElement, s: u8) -> FieldElement {
        let y = &self.q * x;
        if s == 1 {
            y - self.constant(1)
        } else {
            y
        }
    }

    pub fn apply_word(
        &self,
        x: &FieldElement,
        word: &FiniteWord,
        order: MapOrder,
    ) -> Result<FieldElement, DynamicsError> {
        let digits: Vec<u8> = match order {
            MapOrder::Forward => word.digits().to_vec(),
            MapOrder::Composition => word.digits().iter().rev().copied().collect(),
        };
        let mut y = x.clone();
        for (applied, &s) in digits.iter().enumerate() {
            y = self.apply_digit(&y, s).map_err(|e| match e {
                DynamicsError::DomainViolation {
                    digit, bound, value, ..
                } => DynamicsError::DomainViolation {
                    digit,
                    bound,
                    value,
                    applied,
                },
                other => other,
            })?;
        }
        Ok(y)
    }

    /// `(x + s) / q`, the branch of `T_s^{-1}`; prepends digit s to every
    /// expansion of x.
    pub fn inverse_map(&self, x: &FieldElement, s: u8) -> FieldElement {
        let y = if s == 1 { x + self.constant(1) } else { x.clone() };
        y * &self.q_inv
    }

    /// First n digits of the greedy expansion (digit 1 whenever `x ≥ 1/q`).
    pub fn greedy_digits(&self, x: &FieldElement, n: usize) -> FiniteWord {
        self.digits_by(x, n, |y| y >= &self.switch_lo)
    }

    /// First n digits of the lazy expansion (digit 0 whenever `x ≤ 1/(q²-q)`).
    pub fn lazy_digits(&self, x: &FieldElement, n: usize) -> FiniteWord {
        self.digits_by(x, n, |y| y > &self.switch_hi)
    }

    fn digits_by(
        &self,
        x: &FieldElement,
        n: usize,
        choose_one: impl Fn(&FieldElement) -> bool,
    ) -> FiniteWord {
        let mut y = x.clone();
        let mut out = FiniteWord::empty();
        for _ in 0..n {
            let s = u8::from(choose_one(&y));
            out.push(s);
            y = self.step(&y, s);
        }
        out
    }

    /// Exhaustive tree of admissible digit choices from x.
    pub fn expansion_tree(&self, x: &FieldElement, limits: &SearchLimits) -> ExpansionTree {
        let mut ex = Explorer::new(self, limits, false);
        ex.run(x);
        ExpansionTree { nodes: ex.nodes }
    }

    /// Counts the expansions of x, with certificates.
    ///
    /// The search deepens iteratively so that short recurrent cycles are
    /// found before the node budget is spent on deep subtrees.
    pub fn count_expansions(&self, x: &FieldElement, limits: &SearchLimits) -> CountResult {
        let mut depth = limits.max_depth.min(8);
        loop {
            let round = SearchLimits {
                max_depth: depth,
                max_nodes: limits.max_nodes,
            };
            let mut ex = Explorer::new(self, &round, true);
            ex.run(x);
            if let Some((prefix, cycle, value)) = ex.witness {
                return CountResult::InfiniteWitness {
                    prefix,
                    cycle,
                    value,
                };
            }
            if !ex.cut_off {
                let mut expansions = ex.leaves;
                expansions.sort();
                return CountResult::Exact { expansions };
            }
            if depth >= limits.max_depth || ex.nodes.len() >= limits.max_nodes {
                return CountResult::Inconclusive {
                    depth,
                    nodes: ex.nodes.len(),
                };
            }
            depth = (depth * 2).min(limits.max_depth);
        }
    }
}

/// Depth and size bounds for tree searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_depth: 256,
            max_nodes: 200_000,
        }
    }
}

impl SearchLimits {
    /// `4 · (|preperiod| + |period|) + 64` for points given by a word.
    pub fn for_word(word: &PeriodicWord) -> Self {
        SearchLimits {
            max_depth: 4 * (word.preperiod().len() + word.period().len()) + 64,
            ..Self::default()
        }
    }
}

/// Outcome of [`SystemContext::count_expansions`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountResult {
    /// Exactly `expansions.len()` expansions, listed in canonical form.
    Exact { expansions: Vec<PeriodicWord> },
    /// The in-switch point `value` is reached from x by `prefix` and
    /// returns to itself along `cycle`, so x has infinitely many expansions.
    InfiniteWitness {
        prefix: FiniteWord,
        cycle: FiniteWord,
        value: FieldElement,
    },
    /// Some path reached the depth or node bound without resolving.
    Inconclusive { depth: usize, nodes: usize },
}

impl CountResult {
    pub fn exact_count(&self) -> Option<usize> {
        match self {
            CountResult::Exact { expansions } => Some(expansions.len()),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CountResult::InfiniteWitness { .. })
    }

    /// Short label such as `Exact(2)`.
    pub fn label(&self) -> String {
        match self {
            CountResult::Exact { expansions } => format!("Exact({})", expansions.len()),
            CountResult::InfiniteWitness { .. } => "InfiniteWitness".into(),
            CountResult::Inconclusive { .. } => "Inconclusive".into(),
        }
    }

    /// Re-checks the certificates against x from scratch.
    pub fn verify(&self, ctx: &SystemContext, x: &FieldElement) -> bool {
        match self {
            CountResult::Exact { expansions } => {
                let mut seen = std::collections::HashSet::new();
                expansions
                    .iter()
                    .all(|w| seen.insert(w.clone()) && &ctx.value(w) == x)
            }
            CountResult::InfiniteWitness {
                prefix,
                cycle,
                value,
            } => {
                !cycle.is_empty()
                    && ctx.apply_word(x, prefix, MapOrder::Forward).as_ref() == Ok(value)
                    && ctx.in_switch(value)
                    && ctx.apply_word(value, cycle, MapOrder::Forward).as_ref() == Ok(value)
            }
            CountResult::Inconclusive { .. } => true,
        }
    }

    pub fn to_json(&self, ctx: &SystemContext) -> Value {
        match self {
            CountResult::Exact { expansions } => json!({
                "kind": "exact",
                "count": expansions.len(),
                "expansions": expansions.iter().map(|w| json!({
                    "word": w.to_string(),
                    "decimal": ctx.value(w).to_decimal(20),
                })).collect::<Vec<_>>(),
            }),
            CountResult::InfiniteWitness {
                prefix,
                cycle,
                value,
            } => json!({
                "kind": "infinite_witness",
                "prefix": prefix.to_string(),
                "cycle": cycle.to_string(),
                "recurrent_value": value.to_decimal(20),
            }),
            CountResult::Inconclusive { depth, nodes } => json!({
                "kind": "inconclusive",
                "depth": depth,
                "nodes": nodes,
            }),
        }
    }
}

/// How a path of the expansion tree ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathEnd {
    /// The node repeats the value of ancestor `target`; `through_switch` is
    /// set when the cycle visits the switch region.
    Cycle { target: usize, through_switch: bool },
    /// 0 or `1/(q-1)`: a fixed point outside the switch region.
    Absorbing,
    /// Depth or node bound reached.
    Cutoff,
}

#[derive(Clone, Debug)]
pub struct OrbitNode {
    pub value: FieldElement,
    /// Digits applied from the root, first symbol first.
    pub word: FiniteWord,
    pub in_switch: bool,
    pub forced_digit: Option<u8>,
    pub children: Vec<(u8, usize)>,
    pub end: Option<PathEnd>,
}

#[derive(Clone, Debug)]
pub struct ExpansionTree {
    pub nodes: Vec<OrbitNode>,
}

impl ExpansionTree {
    pub fn root(&self) -> &OrbitNode {
        &self.nodes[0]
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let end = match &n.end {
                    None => Value::Null,
                    Some(PathEnd::Cycle {
                        target,
                        through_switch,
                    }) => json!({"cycle_to": target, "through_switch": through_switch}),
                    Some(PathEnd::Absorbing) => json!("absorbing"),
                    Some(PathEnd::Cutoff) => json!("cutoff"),
                };
                json!({
                    "id": id,
                    "word": if n.word.is_empty() { String::new() } else { n.word.to_string() },
                    "decimal": n.value.to_decimal(20),
                    "coeffs": n.value.coeff_strings(),
                    "in_switch": n.in_switch,
                    "forced_digit": n.forced_digit,
                    "children": n.children.iter().map(|(d, c)| json!({"digit": d, "node": c})).collect::<Vec<_>>(),
                    "end": end,
                })
            })
            .collect();
        json!({ "nodes": nodes })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph expansion_tree {\n  node [shape=box];\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let shape = if n.in_switch { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  n{id} [label=\"{}\"{shape}];",
                n.value.to_decimal(6)
            );
            for (d, c) in &n.children {
                let _ = writeln!(out, "  n{id} -> n{c} [label=\"{d}\"];");
            }
            match n.end {
                Some(PathEnd::Cycle { target, .. }) => {
                    let _ = writeln!(out, "  n{id} -> n{target} [style=dashed];");
                }
                Some(PathEnd::Absorbing) => {
                    let d = u8::from(!n.value.is_zero());
                    let _ = writeln!(out, "  n{id} -> n{id} [label=\"{d}\"];");
                }
                _ => {}
            }
        }
        out.push_str("}\n");
        out
    }
}

struct Explorer<'a> {
    ctx: &'a SystemContext,
    limits: SearchLimits,
    stop_on_witness: bool,
    nodes: Vec<OrbitNode>,
    leaves: Vec<PeriodicWord>,
    witness: Option<(FiniteWord, FiniteWord, FieldElement)>,
    cut_off: bool,
    on_path: HashMap<FieldElement, usize>,
    path: Vec<(usize, bool)>,
    digits: Vec<u8>,
}

impl<'a> Explorer<'a> {
    fn new(ctx: &'a SystemContext, limits: &SearchLimits, stop_on_witness: bool) -> Self {
        Explorer {
            ctx,
            limits: *limits,
            stop_on_witness,
            nodes: Vec::new(),
            leaves: Vec::new(),
            witness: None,
            cut_off: false,
            on_path: HashMap::new(),
            path: Vec::new(),
            digits: Vec::new(),
        }
    }

    fn run(&mut self, x: &FieldElement) {
        self.visit(x.clone());
    }

    fn word(&self, range: std::ops::Range<usize>) -> FiniteWord {
        FiniteWord::new(self.digits[range].to_vec()).unwrap()
    }

    fn visit(&mut self, value: FieldElement) -> usize {
        let id = self.nodes.len();
        let word = self.word(0..self.digits.len());
        if let Some(&depth) = self.on_path.get(&value) {
            let through_switch = self.path[depth..].iter().any(|&(_, s)| s);
            let (target, in_switch) = self.path[depth];
            let pre = self.word(0..depth);
            let cycle = self.word(depth..self.digits.len());
            if through_switch {
                if self.witness.is_none() {
                    self.witness = Some((pre, cycle, value.clone()));
                }
            } else {
                self.leaves.push(PeriodicWord::new(pre, cycle).unwrap());
            }
            self.nodes.push(OrbitNode {
                forced_digit: self.nodes[target].forced_digit,
                value,
                word,
                in_switch,
                children: Vec::new(),
                end: Some(PathEnd::Cycle {
                    target,
                    through_switch,
                }),
            });
            return id;
        }

        let absorbing = if value.is_zero() {
            Some(0)
        } else if &value == self.ctx.domain_hi() {
            Some(1)
        } else {
            None
        };
        if let Some(d) = absorbing {
            self.leaves
                .push(PeriodicWord::new(word.clone(), FiniteWord::run(d, 1)).unwrap());
            self.nodes.push(OrbitNode {
                value,
                word,
                in_switch: false,
                forced_digit: Some(d),
                children: Vec::new(),
                end: Some(PathEnd::Absorbing),
            });
            return id;
        }

        let in_switch = self.ctx.in_switch(&value);
        let forced_digit = if in_switch {
            None
        } else {
            self.ctx.forced_digit(&value)
        };
        let cutoff =
            self.digits.len() >= self.limits.max_depth || self.nodes.len() >= self.limits.max_nodes;
        self.nodes.push(OrbitNode {
            value: value.clone(),
            word,
            in_switch,
            forced_digit,
            children: Vec::new(),
            end: cutoff.then_some(PathEnd::Cutoff),
        });
        if cutoff {
            self.cut_off = true;
            return id;
        }

        let choices: Vec<u8> = match forced_digit {
            Some(d) => vec![d],
            None if in_switch => vec![0, 1],
            None => Vec::new(),
        };
        self.on_path.insert(value.clone(), self.path.len());
        self.path.push((id, in_switch));
        for s in choices {
            if self.stop_on_witness && self.witness.is_some() {
                break;
            }
            let child = self.ctx.step(&value, s);
            self.digits.push(s);
            let cid = self.visit(child);
            self.digits.pop();
            self.nodes[id].children.push((s, cid));
        }
        self.path.pop();
        self.on_path.remove(&value);
        id
    }
}
