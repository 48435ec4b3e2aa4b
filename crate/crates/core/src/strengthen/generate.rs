use std::collections::VecDeque;

use super::StrengthenError;
use crate::formula::{Formula, Interval};

/// Candidates obtained by strengthening the operators without intervals, in
/// queue order.
///
/// When a rewrite of a subformula is put back into its context, rewrites
/// that leave the subformula unchanged are skipped, so the result never
/// contains the input itself through a context.
pub fn gen_no_int(f: &Formula) -> VecDeque<Formula> {
    let mut out = VecDeque::new();
    match f {
        Formula::Or(a, b) => {
            out.push_back(Formula::and((**a).clone(), (**b).clone()));
            for a2 in gen_no_int(a).into_iter().filter(|x| x != &**a) {
                out.push_back(Formula::or(a2, (**b).clone()));
            }
            for b2 in gen_no_int(b).into_iter().filter(|x| x != &**b) {
                out.push_back(Formula::or((**a).clone(), b2));
            }
        }
        Formula::Eventually(iv, m) if iv.is_unbounded() => {
            let m = (**m).clone();
            out.push_back(Formula::glob(m.clone()));
            out.push_back(Formula::ev(Formula::glob(m.clone())));
            out.push_back(Formula::glob(Formula::ev(m.clone())));
            out.push_back(Formula::ev(m));
        }
        Formula::Until(iv, m, n) if iv.is_unbounded() => {
            let gm = Formula::glob((**m).clone());
            let n = (**n).clone();
            out.push_back(Formula::and(gm.clone(), Formula::glob(n.clone())));
            out.push_back(Formula::and(
                gm.clone(),
                Formula::ev(Formula::glob(n.clone())),
            ));
            out.push_back(Formula::and(gm, Formula::glob(Formula::ev(n))));
        }
        Formula::And(a, b) => {
            for a2 in gen_no_int(a).into_iter().filter(|x| x != &**a) {
                out.push_back(Formula::and(a2, (**b).clone()));
            }
            for b2 in gen_no_int(b).into_iter().filter(|x| x != &**b) {
                out.push_back(Formula::and((**a).clone(), b2));
            }
        }
        Formula::Globally(iv, m) if iv.is_unbounded() => {
            for m2 in gen_no_int(m).into_iter().filter(|x| x != &**m) {
                out.push_back(Formula::glob(m2));
            }
        }
        _ => {}
    }
    out
}

/// Candidates obtained by moving the interval endpoints of `□` and `◇`,
/// halving the distance to the original interval at each step. `n` is the
/// time-horizon bound and stands in for infinity in midpoint computations.
pub fn gen_int(f: &Formula, n: u64) -> Result<Vec<Formula>, StrengthenError> {
    if let Some(e) = f.max_endpoint() {
        if e > n {
            return Err(StrengthenError::EndpointExceedsHorizon {
                endpoint: e,
                horizon: n,
            });
        }
    }
    Ok(gen_int_rec(f, n))
}

fn gen_int_rec(f: &Formula, n: u64) -> Vec<Formula> {
    match f {
        Formula::Globally(iv, m) if iv.is_unbounded() => {
            gen_int_rec(m, n).into_iter().map(Formula::glob).collect()
        }
        Formula::Globally(iv, m) => globally_intervals(iv, n)
            .into_iter()
            .map(|w| Formula::globally(w, (**m).clone()))
            .collect(),
        Formula::Eventually(iv, _) if iv.is_unbounded() => vec![],
        Formula::Eventually(iv, m) => {
            let point = Interval::bounded(iv.lo(), iv.lo() + 1);
            let mut out = gen_int_rec(&Formula::globally(point, (**m).clone()), n);
            out.extend(
                eventually_intervals(iv, n)
                    .into_iter()
                    .map(|w| Formula::eventually(w, (**m).clone())),
            );
            out
        }
        Formula::Or(a, b) => {
            let mut out: Vec<Formula> = gen_int_rec(a, n)
                .into_iter()
                .map(|a2| Formula::or(a2, (**b).clone()))
                .collect();
            out.extend(
                gen_int_rec(b, n)
                    .into_iter()
                    .map(|b2| Formula::or((**a).clone(), b2)),
            );
            out
        }
        Formula::And(a, b) => {
            let mut out: Vec<Formula> = gen_int_rec(a, n)
                .into_iter()
                .map(|a2| Formula::and(a2, (**b).clone()))
                .collect();
            out.extend(
                gen_int_rec(b, n)
                    .into_iter()
                    .map(|b2| Formula::and((**a).clone(), b2)),
            );
            out
        }
        _ => vec![],
    }
}

fn eff(hi: Option<u64>, n: u64) -> u64 {
    hi.unwrap_or(n)
}

/// The widening sequence for `□_[i,j)`: start from `[0,inf)`, raise the
/// lower bound to the midpoint, then lower the upper bound to the midpoint.
pub(crate) fn globally_intervals(iv: &Interval, n: u64) -> Vec<Interval> {
    let (i, j) = (iv.lo(), iv.hi());
    let mut cur = Interval::unbounded();
    let mut out = Vec::new();
    while iv.is_proper_subset_of(&cur) {
        out.push(cur);
        let (ci, cj) = (cur.lo(), cur.hi());
        cur = if i > ci {
            // an unbounded original keeps its infinite upper bound
            let hi = if j.is_none() { None } else { Some(n) };
            Interval::new((i + ci).div_ceil(2), hi)
        } else {
            Interval::new(ci, Some((eff(j, n) + eff(cj, n)) / 2))
        }
        .expect("midpoint lies between the bounds");
    }
    out
}

/// The shrinking sequence for `◇_[i,j)`: start from `[i,i+1)` and raise the
/// upper bound to the midpoint towards `j`.
pub(crate) fn eventually_intervals(iv: &Interval, n: u64) -> Vec<Interval> {
    let (i, j) = (iv.lo(), iv.hi());
    let mut cur = Interval::bounded(i, i + 1);
    let mut out = Vec::new();
    while cur.is_proper_subset_of(iv) {
        out.push(cur);
        let (ci, cj) = (cur.lo(), cur.hi().expect("bounded while shrinking"));
        cur = if i < ci {
            // unreachable: the lower bound starts at i and never moves
            Interval::new((i + ci) / 2, Some(cj))
        } else {
            let target = eff(j, n);
            let mid = (target + cj).div_ceil(2);
            let hi = if j.is_none() && (mid >= n || mid <= cj) {
                None
            } else {
                Some(mid)
            };
            Interval::new(ci, hi)
        }
        .expect("midpoint lies between the bounds");
    }
    out
}
