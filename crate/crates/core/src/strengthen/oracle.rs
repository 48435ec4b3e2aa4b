//! Exhaustive check of "stronger than" on all short propositional traces.

use std::collections::BTreeSet;

use super::StrengthenError;
use crate::formula::{evaluate_all, AtomKind, Formula, Letter, Trace};

pub const MAX_ORACLE_PROPS: usize = 3;
pub const MAX_ORACLE_LEN: usize = 7;

/// Every trace of length `1..=max_len` over the power set of `aps`.
#[derive(Debug, Clone)]
pub struct TraceSpace {
    traces: Vec<Trace>,
}

impl TraceSpace {
    pub fn new(aps: &BTreeSet<String>, max_len: usize) -> Result<Self, StrengthenError> {
        if aps.len() > MAX_ORACLE_PROPS || max_len > MAX_ORACLE_LEN {
            return Err(StrengthenError::DomainTooLarge {
                props: aps.len(),
                len: max_len,
            });
        }
        let aps: Vec<&String> = aps.iter().collect();
        let letters: Vec<Letter> = (0..1usize << aps.len())
            .map(|mask| {
                Letter::props(
                    aps.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, p)| p.as_str()),
                )
            })
            .collect();
        let mut traces = Vec::new();
        let mut layer: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * letters.len());
            for w in &layer {
                for l in &letters {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    next.push(w2);
                }
            }
            traces.extend(
                next.iter()
                    .map(|w| Trace::new(w.clone()).expect("non-empty trace")),
            );
            layer = next;
        }
        Ok(TraceSpace { traces })
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    /// The first `(trace, position)` where `b` holds but `a` does not.
    pub fn counterexample(
        &self,
        a: &Formula,
        b: &Formula,
    ) -> Result<Option<(Trace, usize)>, StrengthenError> {
        for t in &self.traces {
            let va = evaluate_all(a, t)?;
            let vb = evaluate_all(b, t)?;
            if let Some(k) = (0..t.len()).find(|&k| vb[k] && !va[k]) {
                return Ok(Some((t.clone(), k)));
            }
        }
        Ok(None)
    }
}

fn check_propositional(f: &Formula) -> Result<(), StrengthenError> {
    match f.atom_kind() {
        AtomKind::None | AtomKind::Propositional => Ok(()),
        _ => Err(StrengthenError::NotPropositional(f.to_string())),
    }
}

/// Whether `b` implies `a` at every position of every trace of length
/// `1..=max_len` over `aps`.
pub fn semantically_stronger_oracle(
    a: &Formula,
    b: &Formula,
    aps: &BTreeSet<String>,
    max_len: usize,
) -> Result<bool, StrengthenError> {
    check_propositional(a)?;
    check_propositional(b)?;
    let space = TraceSpace::new(aps, max_len)?;
    Ok(space.counterexample(a, b)?.is_none())
}
