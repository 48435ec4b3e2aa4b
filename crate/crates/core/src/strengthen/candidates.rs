use std::collections::{BTreeSet, VecDeque};

use super::{gen_int, gen_no_int, syntactically_stronger, StrengthenError};
use crate::formula::Formula;

/// The strengthened formulas still worth model checking.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSet {
    pub no_int: VecDeque<Formula>,
    pub int: Vec<Formula>,
    removed: BTreeSet<Formula>,
}

impl CandidateSet {
    pub fn new(no_int: VecDeque<Formula>, int: Vec<Formula>) -> Self {
        CandidateSet {
            no_int,
            int,
            removed: BTreeSet::new(),
        }
    }

    /// Drops a candidate that the system under test violates.
    pub fn remove(&mut self, f: &Formula) {
        self.no_int.retain(|g| g != f);
        self.int.retain(|g| g != f);
        self.removed.insert(f.clone());
    }

    pub fn removed(&self) -> &BTreeSet<Formula> {
        &self.removed
    }

    pub fn len(&self) -> usize {
        self.no_int.len() + self.int.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.no_int.iter().chain(self.int.iter())
    }
}

/// Both candidate lists for `f`, without `f` itself and without repeats.
pub fn gen_candidates(f: &Formula, horizon: u64) -> Result<CandidateSet, StrengthenError> {
    let mut seen = BTreeSet::new();
    seen.insert(f.clone());
    let no_int = gen_no_int(f)
        .into_iter()
        .filter(|g| seen.insert(g.clone()))
        .collect();
    let int = gen_int(f, horizon)?
        .into_iter()
        .filter(|g| seen.insert(g.clone()))
        .collect();
    Ok(CandidateSet::new(no_int, int))
}

/// The first queued interval-free candidate with no strictly stronger one
/// behind it, followed by every interval candidate that no other interval
/// candidate strictly dominates.
pub fn choose_fml(c: &CandidateSet) -> Vec<Formula> {
    let mut chosen = Vec::new();
    let queue: Vec<&Formula> = c.no_int.iter().collect();
    for (k, psi) in queue.iter().enumerate() {
        if !queue[k + 1..]
            .iter()
            .any(|other| syntactically_stronger(psi, other))
        {
            chosen.push((*psi).clone());
            break;
        }
    }
    for psi in &c.int {
        if !c.int.iter().any(|other| syntactically_stronger(psi, other)) && !chosen.contains(psi) {
            chosen.push(psi.clone());
        }
    }
    chosen.retain(|f| !c.removed.contains(f));
    chosen
}
