//! Temporal formulas over propositions or real-valued signals.
//!
//! The surface AST keeps the usual sugar (`F`, `G`, `&&`, `->`) because
//! strengthening pattern-matches on it. [`Formula::normalize`] rewrites a
//! formula into the core connectives (`true`, atoms, `!`, `||`, `X`, `U`),
//! and [`Nnf`] is the negation normal form used by progression and the
//! model checker.

mod eval;
mod nnf;
mod parse;
mod print;
mod trace;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

pub use eval::{evaluate, evaluate_all, robustness};
pub use nnf::{eval_at_end, progress, to_nnf, Literal, Nnf};
pub use parse::parse_formula;
pub use trace::{Letter, PropSet, Trace, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("empty interval [{lo},{hi})")]
    EmptyInterval { lo: u64, hi: u64 },
    #[error("position {position} out of range for trace of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("atom kind mismatch: {0}")]
    KindMismatch(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}

/// Half-open interval `[lo, hi)` over time steps; `hi == None` is infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: u64,
    hi: Option<u64>,
}

impl Interval {
    pub fn new(lo: u64, hi: Option<u64>) -> Result<Self, FormulaError> {
        match hi {
            Some(hi) if hi <= lo => Err(FormulaError::EmptyInterval { lo, hi }),
            _ => Ok(Interval { lo, hi }),
        }
    }

    /// `[lo, hi)`; panics on an empty interval.
    pub fn bounded(lo: u64, hi: u64) -> Self {
        Self::new(lo, Some(hi)).expect("non-empty interval")
    }

    pub fn from(lo: u64) -> Self {
        Interval { lo, hi: None }
    }

    /// `[0, inf)`, the interval of the plain temporal operators.
    pub const fn unbounded() -> Self {
        Interval { lo: 0, hi: None }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> Option<u64> {
        self.hi
    }

    pub fn is_unbounded(&self) -> bool {
        self.lo == 0 && self.hi.is_none()
    }

    pub fn contains_point(&self, t: u64) -> bool {
        t >= self.lo && self.hi.is_none_or(|hi| t < hi)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo
            && match (self.hi, other.hi) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => a <= b,
            }
    }

    pub fn is_proper_subset_of(&self, other: &Interval) -> bool {
        self != other && self.is_subset_of(other)
    }

    /// The window one step later: `[lo-1, hi-1)` for `lo > 0`. For `lo == 0`
    /// returns the remaining part `[0, hi-1)`, or `None` once it is empty.
    pub(crate) fn shifted(&self) -> Option<Interval> {
        let hi = match self.hi {
            None => None,
            Some(1) => return None,
            Some(hi) => Some(hi - 1),
        };
        Some(Interval {
            lo: self.lo.saturating_sub(1),
            hi,
        })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) => write!(f, "[{},{})", self.lo, hi),
            None => write!(f, "[{},inf)", self.lo),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
}

impl CmpOp {
    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            CmpOp::Lt => value < threshold,
            CmpOp::Gt => value > threshold,
            CmpOp::Le => value <= threshold,
            CmpOp::Ge => value >= threshold,
        }
    }
}

/// A real threshold with total equality and ordering, so formulas can be
/// hashed and kept in ordered sets.
#[derive(Debug, Clone, Copy)]
pub struct Threshold(pub f64);

impl PartialEq for Threshold {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for Threshold {}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Hash for Threshold {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

/// An inequality atom `var op threshold`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Comparison {
    pub var: String,
    pub op: CmpOp,
    pub threshold: Threshold,
}

impl Comparison {
    pub fn new(var: impl Into<String>, op: CmpOp, threshold: f64) -> Self {
        Comparison {
            var: var.into(),
            op,
            threshold: Threshold(threshold),
        }
    }

    pub fn negated(&self) -> Comparison {
        Comparison {
            var: self.var.clone(),
            op: self.op.negated(),
            threshold: self.threshold,
        }
    }

    pub fn holds(&self, value: f64) -> bool {
        self.op.holds(value, self.threshold.0)
    }

    /// Signed distance to the threshold, positive iff the comparison holds
    /// strictly.
    pub fn robustness(&self, value: f64) -> f64 {
        let c = self.threshold.0;
        match self.op {
            CmpOp::Gt | CmpOp::Ge => value - c,
            CmpOp::Lt | CmpOp::Le => c - value,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.var, self.op.symbol(), self.threshold.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Cmp(Comparison),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Release(Interval, Box<Formula>, Box<Formula>),
    Eventually(Interval, Box<Formula>),
    Globally(Interval, Box<Formula>),
}

/// Which kind of atoms a formula is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    /// No atoms at all (only constants).
    None,
    Propositional,
    Signal,
    Mixed,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn cmp(var: impl Into<String>, op: CmpOp, threshold: f64) -> Formula {
        Formula::Cmp(Comparison::new(var, op, threshold))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(i: Interval, a: Formula, b: Formula) -> Formula {
        Formula::Until(i, Box::new(a), Box::new(b))
    }

    pub fn release(i: Interval, a: Formula, b: Formula) -> Formula {
        Formula::Release(i, Box::new(a), Box::new(b))
    }

    pub fn eventually(i: Interval, f: Formula) -> Formula {
        Formula::Eventually(i, Box::new(f))
    }

    pub fn globally(i: Interval, f: Formula) -> Formula {
        Formula::Globally(i, Box::new(f))
    }

    /// `F f` with the unbounded interval.
    pub fn ev(f: Formula) -> Formula {
        Formula::eventually(Interval::unbounded(), f)
    }

    /// `G f` with the unbounded interval.
    pub fn glob(f: Formula) -> Formula {
        Formula::globally(Interval::unbounded(), f)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Cmp(_) => vec![],
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(_, a)
            | Formula::Globally(_, a) => {
                vec![a]
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(_, a, b)
            | Formula::Release(_, a, b) => vec![a, b],
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn atom_kind(&self) -> AtomKind {
        match self {
            Formula::True | Formula::False => AtomKind::None,
            Formula::Atom(_) => AtomKind::Propositional,
            Formula::Cmp(_) => AtomKind::Signal,
            _ => {
                self.children()
                    .iter()
                    .map(|c| c.atom_kind())
                    .fold(AtomKind::None, |acc, k| match (acc, k) {
                        (AtomKind::None, k) | (k, AtomKind::None) => k,
                        (a, b) if a == b => a,
                        _ => AtomKind::Mixed,
                    })
            }
        }
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn comparisons(&self) -> Vec<Comparison> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Cmp(c) = f {
                out.push(c.clone());
            }
        });
        out
    }

    /// Largest finite interval endpoint occurring in the formula.
    pub fn max_endpoint(&self) -> Option<u64> {
        let mut max: Option<u64> = None;
        self.visit(&mut |f| {
            let iv = match f {
                Formula::Until(i, ..)
                | Formula::Release(i, ..)
                | Formula::Eventually(i, _)
                | Formula::Globally(i, _) => i,
                _ => return,
            };
            let m = iv.hi().unwrap_or(iv.lo()).max(iv.lo());
            max = Some(max.map_or(m, |x| x.max(m)));
        });
        max
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Replaces every atom and comparison through `map`.
    pub fn map_atoms<M: FnMut(&Formula) -> Formula>(&self, map: &mut M) -> Formula {
        let mut rec = |g: &Formula| Box::new(g.map_atoms(map));
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(_) | Formula::Cmp(_) => map(self),
            Formula::Not(a) => Formula::Not(rec(a)),
            Formula::Next(a) => Formula::Next(rec(a)),
            Formula::Eventually(i, a) => Formula::Eventually(*i, rec(a)),
            Formula::Globally(i, a) => Formula::Globally(*i, rec(a)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
            Formula::Until(i, a, b) => Formula::Until(*i, rec(a), rec(b)),
            Formula::Release(i, a, b) => Formula::Release(*i, rec(a), rec(b)),
        }
    }

    /// Rewrites the formula into the core connectives `true`, atoms, `<`/`>`
    /// comparisons, `!`, `||`, `X` and `U`, removing double negations.
    pub fn normalize(&self) -> Formula {
        fn neg(f: Formula) -> Formula {
            match f {
                Formula::Not(inner) => *inner,
                other => Formula::not(other),
            }
        }
        match self {
            Formula::True | Formula::Atom(_) => self.clone(),
            Formula::False => neg(Formula::True),
            Formula::Cmp(c) => match c.op {
                CmpOp::Lt | CmpOp::Gt => self.clone(),
                CmpOp::Le | CmpOp::Ge => neg(Formula::Cmp(c.negated())),
            },
            Formula::Not(a) => neg(a.normalize()),
            Formula::Or(a, b) => Formula::or(a.normalize(), b.normalize()),
            Formula::And(a, b) => neg(Formula::or(neg(a.normalize()), neg(b.normalize()))),
            Formula::Implies(a, b) => Formula::or(neg(a.normalize()), b.normalize()),
            Formula::Next(a) => Formula::next(a.normalize()),
            Formula::Until(i, a, b) => Formula::until(*i, a.normalize(), b.normalize()),
            Formula::Release(i, a, b) => {
                neg(Formula::until(*i, neg(a.normalize()), neg(b.normalize())))
            }
            Formula::Eventually(i, a) => Formula::until(*i, Formula::True, a.normalize()),
            Formula::Globally(i, a) => neg(Formula::until(*i, Formula::True, neg(a.normalize()))),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
