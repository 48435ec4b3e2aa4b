//! Negation normal form and formula progression.
//!
//! An [`Nnf`] denotes a property of the *remaining* trace, which may be empty.
//! [`progress`] consumes one letter and returns the obligation on the rest;
//! [`eval_at_end`] decides the obligation on the empty remainder.

use std::fmt;

use super::{Comparison, Formula, FormulaError, Interval, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    /// A proposition with its polarity (`false` means negated).
    Prop(String, bool),
    Cmp(Comparison),
}

impl Literal {
    pub fn negated(&self) -> Literal {
        match self {
            Literal::Prop(p, pol) => Literal::Prop(p.clone(), !pol),
            Literal::Cmp(c) => Literal::Cmp(c.negated()),
        }
    }

    pub fn holds(&self, letter: &Letter) -> Result<bool, FormulaError> {
        match self {
            Literal::Prop(p, pol) => Ok(letter.has_prop(p)? == *pol),
            Literal::Cmp(c) => Ok(c.holds(letter.value_of(c)?)),
        }
    }
}

/// Formula in negation normal form. Conjunctions and disjunctions are
/// n-ary, flattened, sorted and free of duplicates when built through the
/// smart constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nnf {
    True,
    False,
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    /// Strong next: a next position must exist.
    Next(Box<Nnf>),
    /// Weak next: holds on the last position.
    WeakNext(Box<Nnf>),
    Until(Interval, Box<Nnf>, Box<Nnf>),
    Release(Interval, Box<Nnf>, Box<Nnf>),
}

impl Nnf {
    pub fn and(items: Vec<Nnf>) -> Nnf {
        junction(items, true)
    }

    pub fn or(items: Vec<Nnf>) -> Nnf {
        junction(items, false)
    }

    pub fn next(a: Nnf) -> Nnf {
        match a {
            Nnf::False => Nnf::False,
            a => Nnf::Next(Box::new(a)),
        }
    }

    pub fn weak_next(a: Nnf) -> Nnf {
        match a {
            Nnf::True => Nnf::True,
            a => Nnf::WeakNext(Box::new(a)),
        }
    }

    pub fn until(iv: Interval, a: Nnf, b: Nnf) -> Nnf {
        if a == Nnf::False || b == Nnf::False {
            return Nnf::False;
        }
        Nnf::Until(iv, Box::new(a), Box::new(b))
    }

    pub fn release(iv: Interval, a: Nnf, b: Nnf) -> Nnf {
        if a == Nnf::True || b == Nnf::True {
            return Nnf::True;
        }
        Nnf::Release(iv, Box::new(a), Box::new(b))
    }

    pub fn negate(&self) -> Nnf {
        match self {
            Nnf::True => Nnf::False,
            Nnf::False => Nnf::True,
            Nnf::Lit(l) => Nnf::Lit(l.negated()),
            Nnf::And(xs) => Nnf::or(xs.iter().map(Nnf::negate).collect()),
            Nnf::Or(xs) => Nnf::and(xs.iter().map(Nnf::negate).collect()),
            Nnf::Next(a) => Nnf::weak_next(a.negate()),
            Nnf::WeakNext(a) => Nnf::next(a.negate()),
            Nnf::Until(i, a, b) => Nnf::release(*i, a.negate(), b.negate()),
            Nnf::Release(i, a, b) => Nnf::until(*i, a.negate(), b.negate()),
        }
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Nnf::True | Nnf::False | Nnf::Lit(_) => 0,
            Nnf::And(xs) | Nnf::Or(xs) => xs.iter().map(Nnf::size).sum(),
            Nnf::Next(a) | Nnf::WeakNext(a) => a.size(),
            Nnf::Until(_, a, b) | Nnf::Release(_, a, b) => a.size() + b.size(),
        }
    }

    /// Converts back to the surface syntax, mainly for display.
    pub fn to_formula(&self) -> Formula {
        let fold = |xs: &[Nnf], unit: Formula, op: fn(Formula, Formula) -> Formula| {
            xs.iter().map(Nnf::to_formula).reduce(op).unwrap_or(unit)
        };
        match self {
            Nnf::True => Formula::True,
            Nnf::False => Formula::False,
            Nnf::Lit(Literal::Prop(p, true)) => Formula::atom(p.clone()),
            Nnf::Lit(Literal::Prop(p, false)) => Formula::not(Formula::atom(p.clone())),
            Nnf::Lit(Literal::Cmp(c)) => Formula::Cmp(c.clone()),
            Nnf::And(xs) => fold(xs, Formula::True, Formula::and),
            Nnf::Or(xs) => fold(xs, Formula::False, Formula::or),
            Nnf::Next(a) => Formula::next(a.to_formula()),
            Nnf::WeakNext(a) => Formula::not(Formula::next(a.negate().to_formula())),
            Nnf::Until(i, a, b) if **a == Nnf::True => Formula::eventually(*i, b.to_formula()),
            Nnf::Until(i, a, b) => Formula::until(*i, a.to_formula(), b.to_formula()),
            Nnf::Release(i, a, b) if **a == Nnf::False => Formula::globally(*i, b.to_formula()),
            Nnf::Release(i, a, b) => Formula::release(*i, a.to_formula(), b.to_formula()),
        }
    }
}

impl fmt::Display for Nnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Builds a conjunction (`conj`) or disjunction with flattening, constant
/// folding, complementary-literal detection and absorption.
fn junction(items: Vec<Nnf>, conj: bool) -> Nnf {
    let (unit, zero) = if conj {
        (Nnf::True, Nnf::False)
    } else {
        (Nnf::False, Nnf::True)
    };
    let mut flat = Vec::with_capacity(items.len());
    for it in items {
        match it {
            Nnf::And(xs) if conj => flat.extend(xs),
            Nnf::Or(xs) if !conj => flat.extend(xs),
            x if x == zero => return zero,
            x if x == unit => {}
            x => flat.push(x),
        }
    }
    flat.sort();
    flat.dedup();
    for x in &flat {
        if let Nnf::Lit(l) = x {
            if flat.binary_search(&Nnf::Lit(l.negated())).is_ok() {
                return zero;
            }
        }
    }
    // absorption: p && (p || q) == p, p || (p && q) == p
    let absorbed = |x: &Nnf| match (x, conj) {
        (Nnf::Or(ys), true) | (Nnf::And(ys), false) => {
            ys.iter().any(|y| flat.binary_search(y).is_ok())
        }
        _ => false,
    };
    let keep: Vec<bool> = flat.iter().map(|x| !absorbed(x)).collect();
    let mut flat: Vec<Nnf> = flat
        .into_iter()
        .zip(keep)
        .filter_map(|(x, k)| k.then_some(x))
        .collect();
    match flat.len() {
        0 => unit,
        1 => flat.pop().expect("one element"),
        _ if conj => Nnf::And(flat),
        _ => Nnf::Or(flat),
    }
}

/// Negation normal form of `f`. `F` and `G` become `U` and `R` with the
/// constants `true` and `false` as left operand.
pub fn to_nnf(f: &Formula) -> Nnf {
    nnf(f, true)
}

fn nnf(f: &Formula, pos: bool) -> Nnf {
    match f {
        Formula::True if pos => Nnf::True,
        Formula::True => Nnf::False,
        Formula::False if pos => Nnf::False,
        Formula::False => Nnf::True,
        Formula::Atom(p) => Nnf::Lit(Literal::Prop(p.clone(), pos)),
        Formula::Cmp(c) if pos => Nnf::Lit(Literal::Cmp(c.clone())),
        Formula::Cmp(c) => Nnf::Lit(Literal::Cmp(c.negated())),
        Formula::Not(a) => nnf(a, !pos),
        Formula::And(a, b) if pos => Nnf::and(vec![nnf(a, true), nnf(b, true)]),
        Formula::And(a, b) => Nnf::or(vec![nnf(a, false), nnf(b, false)]),
        Formula::Or(a, b) if pos => Nnf::or(vec![nnf(a, true), nnf(b, true)]),
        Formula::Or(a, b) => Nnf::and(vec![nnf(a, false), nnf(b, false)]),
        Formula::Implies(a, b) if pos => Nnf::or(vec![nnf(a, false), nnf(b, true)]),
        Formula::Implies(a, b) => Nnf::and(vec![nnf(a, true), nnf(b, false)]),
        Formula::Next(a) if pos => Nnf::next(nnf(a, true)),
        Formula::Next(a) => Nnf::weak_next(nnf(a, false)),
        Formula::Until(i, a, b) if pos => Nnf::until(*i, nnf(a, true), nnf(b, true)),
        Formula::Until(i, a, b) => Nnf::release(*i, nnf(a, false), nnf(b, false)),
        Formula::Release(i, a, b) if pos => Nnf::release(*i, nnf(a, true), nnf(b, true)),
        Formula::Release(i, a, b) => Nnf::until(*i, nnf(a, false), nnf(b, false)),
        Formula::Eventually(i, a) if pos => Nnf::until(*i, Nnf::True, nnf(a, true)),
        Formula::Eventually(i, a) => Nnf::release(*i, Nnf::False, nnf(a, false)),
        Formula::Globally(i, a) if pos => Nnf::release(*i, Nnf::False, nnf(a, true)),
        Formula::Globally(i, a) => Nnf::until(*i, Nnf::True, nnf(a, false)),
    }
}

/// The obligation on the rest of the trace after reading `letter`.
pub fn progress(f: &Nnf, letter: &Letter) -> Result<Nnf, FormulaError> {
    Ok(match f {
        Nnf::True => Nnf::True,
        Nnf::False => Nnf::False,
        Nnf::Lit(l) => {
            if l.holds(letter)? {
                Nnf::True
            } else {
                Nnf::False
            }
        }
        Nnf::And(xs) => Nnf::and(
            xs.iter()
                .map(|x| progress(x, letter))
                .collect::<Result<_, _>>()?,
        ),
        Nnf::Or(xs) => Nnf::or(
            xs.iter()
                .map(|x| progress(x, letter))
                .collect::<Result<_, _>>()?,
        ),
        // `X a` becomes "a, and the trace goes on"; that is plain `a` unless
        // `a` would hold on the empty remainder
        Nnf::Next(a) if !eval_at_end(a) => (**a).clone(),
        Nnf::Next(a) => Nnf::until(Interval::bounded(0, 1), Nnf::True, (**a).clone()),
        Nnf::WeakNext(a) if eval_at_end(a) => (**a).clone(),
        Nnf::WeakNext(a) => Nnf::release(Interval::bounded(0, 1), Nnf::False, (**a).clone()),
        Nnf::Until(iv, a, b) => {
            let later = match iv.shifted() {
                Some(s) => Nnf::until(s, (**a).clone(), (**b).clone()),
                None => Nnf::False,
            };
            let pa = progress(a, letter)?;
            if iv.lo() > 0 {
                Nnf::and(vec![pa, later])
            } else {
                Nnf::and(vec![pa, Nnf::or(vec![progress(b, letter)?, later])])
            }
        }
        Nnf::Release(iv, a, b) => {
            let later = match iv.shifted() {
                Some(s) => Nnf::release(s, (**a).clone(), (**b).clone()),
                None => Nnf::True,
            };
            let pa = progress(a, letter)?;
            if iv.lo() > 0 {
                Nnf::or(vec![pa, later])
            } else {
                Nnf::or(vec![pa, Nnf::and(vec![progress(b, letter)?, later])])
            }
        }
    })
}

/// Whether the obligation holds on the empty remainder.
pub fn eval_at_end(f: &Nnf) -> bool {
    match f {
        Nnf::True | Nnf::WeakNext(_) | Nnf::Release(..) => true,
        Nnf::False | Nnf::Lit(_) | Nnf::Next(_) | Nnf::Until(..) => false,
        Nnf::And(xs) => xs.iter().all(eval_at_end),
        Nnf::Or(xs) => xs.iter().any(eval_at_end),
    }
}
