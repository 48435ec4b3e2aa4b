//! Finite-horizon model checking by breadth-first search over pairs of a
//! location and a progressed formula.
//!
//! A word `w` with `1 <= |w| <= H` is a violation when the output trace of
//! `w` does not satisfy the formula at position 0. Every newly reached pair
//! is tested, so the first violation found is the shortest one, and among
//! those the smallest in input-alphabet order.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{MachineError, MealyMachine};
use crate::formula::{
    eval_at_end, progress, to_nnf, AtomKind, Formula, FormulaError, Letter, Nnf, PropSet,
};

/// Default bound on the number of explored product nodes.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated {
        witness: Vec<usize>,
        outputs: Vec<PropSet>,
    },
    Inconclusive(String),
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }
}

struct Interner {
    ids: HashMap<Nnf, usize>,
    formulas: Vec<Nnf>,
    at_end: Vec<bool>,
}

impl Interner {
    fn id(&mut self, f: Nnf) -> usize {
        if let Some(&i) = self.ids.get(&f) {
            return i;
        }
        let i = self.formulas.len();
        self.at_end.push(eval_at_end(&f));
        self.formulas.push(f.clone());
        self.ids.insert(f, i);
        i
    }
}

pub fn model_check(
    m: &MealyMachine,
    f: &Formula,
    horizon: usize,
    cap: usize,
) -> Result<Verdict, MachineError> {
    if horizon == 0 || cap == 0 {
        return Err(MachineError::InvalidBound);
    }
    if matches!(f.atom_kind(), AtomKind::Signal | AtomKind::Mixed) {
        return Err(FormulaError::KindMismatch(format!(
            "model checking needs a propositional formula, got {f}"
        ))
        .into());
    }
    let letters: Vec<Letter> = m
        .output_letters()
        .iter()
        .map(|o| Letter::Props(o.clone()))
        .collect();
    let mut forms = Interner {
        ids: HashMap::new(),
        formulas: Vec::new(),
        at_end: Vec::new(),
    };
    let true_id = forms.id(Nnf::True);
    let root = forms.id(to_nnf(f));
    let mut memo: HashMap<(usize, usize), usize> = HashMap::new();

    // nodes[k] = (location, formula id, parent node, input letter, depth)
    let mut nodes: Vec<(usize, usize, usize, usize, usize)> =
        vec![(m.initial(), root, usize::MAX, 0, 0)];
    let mut visited: HashSet<(usize, usize)> = HashSet::from([(m.initial(), root)]);
    let mut queue = VecDeque::from([0usize]);

    while let Some(k) = queue.pop_front() {
        let (loc, fid, _, _, depth) = nodes[k];
        if depth >= horizon {
            continue;
        }
        for a in 0..m.inputs().len() {
            let (target, o) = m.step_index(loc, a);
            let next = match memo.get(&(fid, o)) {
                Some(&g) => g,
                None => {
                    let g = progress(&forms.formulas[fid], &letters[o])?;
                    let g = forms.id(g);
                    memo.insert((fid, o), g);
                    g
                }
            };
            if !forms.at_end[next] {
                let mut witness = vec![a];
                let mut cur = k;
                while nodes[cur].2 != usize::MAX {
                    witness.push(nodes[cur].3);
                    cur = nodes[cur].2;
                }
                witness.reverse();
                let outputs = m.run(&witness)?;
                return Ok(Verdict::Violated { witness, outputs });
            }
            if next == true_id || !visited.insert((target, next)) {
                continue;
            }
            if visited.len() > cap {
                return Ok(Verdict::Inconclusive(format!("state cap {cap} exceeded")));
            }
            nodes.push((target, next, k, a, depth + 1));
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(Verdict::Holds)
}
