//! One-step strengthening and its inverse.
//!
//! Rule numbers follow the enumeration of the strengthening relation:
//! 1 `∨ ↣ ∧`, 2 `◇ ↣ □◇`, 3 `□◇ ↣ ◇□`, 4 `◇□ ↣ □`, 5 `◇_I ↣ □_I`,
//! 6 `μ U ν ↣ □μ ∧ □◇ν`, 7 interval shrinking under `◇`, 8 negation,
//! 9/10 left/right disjunct, 11 next, 12 right operand of `U`. Operators
//! that are abbreviations (`∧`, `→`, `□`, `R`) inherit the rule of their
//! outermost expansion, so congruence under `∧`, `□` and `R` is tagged 8.

use crate::formula::{Formula, Interval};

type Tagged = Vec<(u8, Formula)>;

fn push(out: &mut Tagged, rule: u8, f: Formula) {
    if !out.iter().any(|(_, g)| *g == f) {
        out.push((rule, f));
    }
}

/// Canonical single-step shrinkings `[i+1,j)` and `[i,j-1)`.
fn shrinkings(iv: &Interval) -> Vec<Interval> {
    let mut out = Vec::new();
    if let Ok(s) = Interval::new(iv.lo() + 1, iv.hi()) {
        out.push(s);
    }
    if let Some(hi) = iv.hi() {
        if let Ok(s) = Interval::new(iv.lo(), Some(hi - 1)) {
            out.push(s);
        }
    }
    out
}

/// Canonical single-step widenings `[i-1,j)` and `[i,j+1)`.
fn widenings(iv: &Interval) -> Vec<Interval> {
    let mut out = Vec::new();
    if iv.lo() > 0 {
        out.push(Interval::new(iv.lo() - 1, iv.hi()).expect("wider interval"));
    }
    if let Some(hi) = iv.hi() {
        out.push(Interval::new(iv.lo(), Some(hi + 1)).expect("wider interval"));
    }
    out
}

fn unbounded_child(f: &Formula, want_globally: bool) -> Option<&Formula> {
    match f {
        Formula::Globally(i, m) if want_globally && i.is_unbounded() => Some(m),
        Formula::Eventually(i, m) if !want_globally && i.is_unbounded() => Some(m),
        _ => None,
    }
}

/// All `ψ` with `f ↣ ψ` in one rule application, tagged with the rule.
pub fn strengthen(f: &Formula) -> Tagged {
    let mut out = Tagged::new();
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Cmp(_) => {}
        Formula::Not(a) => {
            for w in weaken(a) {
                push(&mut out, 8, Formula::not(w));
            }
        }
        Formula::Or(a, b) => {
            push(&mut out, 1, Formula::and((**a).clone(), (**b).clone()));
            for (_, s) in strengthen(a) {
                push(&mut out, 9, Formula::or(s, (**b).clone()));
            }
            for (_, s) in strengthen(b) {
                push(&mut out, 10, Formula::or((**a).clone(), s));
            }
        }
        Formula::And(a, b) => {
            for (_, s) in strengthen(a) {
                push(&mut out, 8, Formula::and(s, (**b).clone()));
            }
            for (_, s) in strengthen(b) {
                push(&mut out, 8, Formula::and((**a).clone(), s));
            }
        }
        Formula::Implies(a, b) => {
            push(
                &mut out,
                1,
                Formula::and(Formula::not((**a).clone()), (**b).clone()),
            );
            for w in weaken(a) {
                push(&mut out, 9, Formula::implies(w, (**b).clone()));
            }
            for (_, s) in strengthen(b) {
                push(&mut out, 10, Formula::implies((**a).clone(), s));
            }
        }
        Formula::Next(a) => {
            for (_, s) in strengthen(a) {
                push(&mut out, 11, Formula::next(s));
            }
        }
        Formula::Until(iv, a, b) => {
            if iv.is_unbounded() {
                push(
                    &mut out,
                    6,
                    Formula::and(
                        Formula::glob((**a).clone()),
                        Formula::glob(Formula::ev((**b).clone())),
                    ),
                );
            }
            for (_, s) in strengthen(b) {
                push(&mut out, 12, Formula::until(*iv, (**a).clone(), s));
            }
        }
        Formula::Release(iv, a, b) => {
            for (_, s) in strengthen(b) {
                push(&mut out, 8, Formula::release(*iv, (**a).clone(), s));
            }
        }
        Formula::Eventually(iv, a) => {
            if iv.is_unbounded() {
                push(&mut out, 2, Formula::glob(f.clone()));
                if let Some(m) = unbounded_child(a, true) {
                    push(&mut out, 4, Formula::glob(m.clone()));
                }
            }
            push(&mut out, 5, Formula::globally(*iv, (**a).clone()));
            for s in shrinkings(iv) {
                push(&mut out, 7, Formula::eventually(s, (**a).clone()));
            }
            for (_, s) in strengthen(a) {
                push(&mut out, 12, Formula::eventually(*iv, s));
            }
        }
        Formula::Globally(iv, a) => {
            if iv.is_unbounded() {
                if let Some(m) = unbounded_child(a, false) {
                    push(&mut out, 3, Formula::ev(Formula::glob(m.clone())));
                }
            }
            for w in widenings(iv) {
                push(&mut out, 8, Formula::globally(w, (**a).clone()));
            }
            for (_, s) in strengthen(a) {
                push(&mut out, 8, Formula::globally(*iv, s));
            }
        }
    }
    out
}

/// All `w` with `w ↣ f` in one rule application (the inverse relation).
pub fn weaken(f: &Formula) -> Vec<Formula> {
    let mut out = Tagged::new();
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Cmp(_) => {}
        Formula::Not(a) => {
            for (_, s) in strengthen(a) {
                push(&mut out, 8, Formula::not(s));
            }
        }
        Formula::Or(a, b) => {
            for w in weaken(a) {
                push(&mut out, 9, Formula::or(w, (**b).clone()));
            }
            for w in weaken(b) {
                push(&mut out, 10, Formula::or((**a).clone(), w));
            }
        }
        Formula::And(a, b) => {
            push(&mut out, 1, Formula::or((**a).clone(), (**b).clone()));
            if let (Some(m), Some(gf)) = (unbounded_child(a, true), unbounded_child(b, true)) {
                if let Some(n) = unbounded_child(gf, false) {
                    push(
                        &mut out,
                        6,
                        Formula::until(Interval::unbounded(), m.clone(), n.clone()),
                    );
                }
            }
            for w in weaken(a) {
                push(&mut out, 8, Formula::and(w, (**b).clone()));
            }
            for w in weaken(b) {
                push(&mut out, 8, Formula::and((**a).clone(), w));
            }
        }
        Formula::Implies(a, b) => {
            for (_, s) in strengthen(a) {
                push(&mut out, 9, Formula::implies(s, (**b).clone()));
            }
            for w in weaken(b) {
                push(&mut out, 10, Formula::implies((**a).clone(), w));
            }
        }
        Formula::Next(a) => {
            for w in weaken(a) {
                push(&mut out, 11, Formula::next(w));
            }
        }
        Formula::Until(iv, a, b) => {
            for w in weaken(b) {
                push(&mut out, 12, Formula::until(*iv, (**a).clone(), w));
            }
        }
        Formula::Release(iv, a, b) => {
            if iv.is_unbounded() {
                push(
                    &mut out,
                    8,
                    Formula::or(
                        Formula::ev((**a).clone()),
                        Formula::ev(Formula::glob((**b).clone())),
                    ),
                );
            }
            for w in weaken(b) {
                push(&mut out, 8, Formula::release(*iv, (**a).clone(), w));
            }
        }
        Formula::Eventually(iv, a) => {
            if iv.is_unbounded() {
                if let Some(m) = unbounded_child(a, true) {
                    push(&mut out, 3, Formula::glob(Formula::ev(m.clone())));
                }
            }
            for w in widenings(iv) {
                push(&mut out, 7, Formula::eventually(w, (**a).clone()));
            }
            for w in weaken(a) {
                push(&mut out, 12, Formula::eventually(*iv, w));
            }
        }
        Formula::Globally(iv, a) => {
            push(&mut out, 5, Formula::eventually(*iv, (**a).clone()));
            if iv.is_unbounded() {
                push(&mut out, 4, Formula::ev(f.clone()));
                if let Some(m) = unbounded_child(a, false) {
                    push(&mut out, 2, Formula::ev(m.clone()));
                }
            }
            for s in shrinkings(iv) {
                push(&mut out, 8, Formula::globally(s, (**a).clone()));
            }
            for w in weaken(a) {
                push(&mut out, 8, Formula::globally(*iv, w));
            }
        }
    }
    out.into_iter().map(|(_, f)| f).collect()
}

/// Every one-step strengthening of `f`: structural rules at the root and
/// congruence rules below it. Transitivity is left to repeated calls.
pub fn rule_instances(f: &Formula) -> Vec<(u8, Formula)> {
    strengthen(f)
}
