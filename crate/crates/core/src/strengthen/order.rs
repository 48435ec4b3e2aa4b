//! A structural approximation of "at least as strong", used to pick the
//! strongest candidates.

use crate::formula::{Formula, Interval};

/// Whether `b` is strictly stronger than `a` by the structural comparator.
/// Sound but incomplete; never true for `a == b`.
pub fn syntactically_stronger(a: &Formula, b: &Formula) -> bool {
    at_least_as_strong(a, b) && !at_least_as_strong(b, a)
}

/// `f` without leading repetitions of the unbounded operator `op`, using
/// `□□x ≡ □x` and `◇◇x ≡ ◇x`.
fn collapse(f: &Formula, globally: bool) -> &Formula {
    match f {
        Formula::Globally(i, x) if globally && i.is_unbounded() => collapse(x, globally),
        Formula::Eventually(i, x) if !globally && i.is_unbounded() => collapse(x, globally),
        other => other,
    }
}

/// The unbounded chain `◇x ⊑ □◇x ⊑ ◇□x ⊑ □x`, as (level, core) pairs.
fn chain_levels(f: &Formula) -> Vec<(u8, &Formula)> {
    let unb = |i: &Interval| i.is_unbounded();
    let mut out = Vec::new();
    match f {
        Formula::Eventually(i, x) if unb(i) => {
            let x = collapse(x, false);
            out.push((0, x));
            if let Formula::Globally(j, y) = x {
                if unb(j) {
                    out.push((2, collapse(y, true)));
                }
            }
        }
        Formula::Globally(i, x) if unb(i) => {
            let x = collapse(x, true);
            out.push((3, x));
            if let Formula::Eventually(j, y) = x {
                if unb(j) {
                    out.push((1, collapse(y, false)));
                }
            }
        }
        _ => {}
    }
    out
}

/// Whether `b` implies `a` by structural reasoning.
pub(crate) fn at_least_as_strong(a: &Formula, b: &Formula) -> bool {
    use Formula as F;
    if a == b {
        return true;
    }
    let la = chain_levels(a);
    let lb = chain_levels(b);
    if la.iter().any(|(x, ca)| {
        lb.iter()
            .any(|(y, cb)| x <= y && at_least_as_strong(ca, cb))
    }) {
        return true;
    }
    match (a, b) {
        (F::Or(a1, a2), F::Or(b1, b2))
        | (F::And(a1, a2), F::And(b1, b2))
        | (F::Or(a1, a2), F::And(b1, b2)) => {
            at_least_as_strong(a1, b1) && at_least_as_strong(a2, b2)
        }
        (F::Implies(a1, a2), F::Implies(b1, b2)) => {
            at_least_as_strong(b1, a1) && at_least_as_strong(a2, b2)
        }
        (F::Not(x), F::Not(y)) => at_least_as_strong(y, x),
        (F::Next(x), F::Next(y)) => at_least_as_strong(x, y),
        (F::Globally(i, x), F::Globally(j, y)) => i.is_subset_of(j) && at_least_as_strong(x, y),
        (F::Eventually(i, x), F::Eventually(j, y)) => j.is_subset_of(i) && at_least_as_strong(x, y),
        // both windows contain the current position
        (F::Eventually(i, x), F::Globally(j, y)) => {
            i.lo() == 0 && j.lo() == 0 && at_least_as_strong(x, y)
        }
        (F::Until(i, a1, a2), F::Until(j, b1, b2)) => {
            j.is_subset_of(i) && at_least_as_strong(a1, b1) && at_least_as_strong(a2, b2)
        }
        (F::Release(i, a1, a2), F::Release(j, b1, b2)) => {
            i.is_subset_of(j) && at_least_as_strong(a1, b1) && at_least_as_strong(a2, b2)
        }
        // μ U ν is implied by □μ' ∧ y whenever μ' implies μ and y implies ◇ν
        (F::Until(i, m, n), F::And(g, y)) if i.is_unbounded() => match &**g {
            F::Globally(j, m2) if j.is_unbounded() => {
                at_least_as_strong(m, m2) && at_least_as_strong(&F::ev((**n).clone()), y)
            }
            _ => false,
        },
        _ => false,
    }
}
