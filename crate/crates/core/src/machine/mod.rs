//! Deterministic Mealy machines with proposition-set outputs.

mod check;
mod format;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::formula::{FormulaError, PropSet};

pub use check::{model_check, Verdict, DEFAULT_CAP};
pub use format::{load_machine, save_machine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no transition from location `{location}` on input `{input}`")]
    NotTotal { location: String, input: String },
    #[error("location `{0}` is used but has no transitions")]
    DanglingLocation(String),
    #[error("unknown input letter `{0}`")]
    UnknownInput(String),
    #[error("output proposition `{0}` is not declared")]
    UnknownProposition(String),
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("horizon and state cap must be positive")]
    InvalidBound,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// A complete deterministic Mealy machine. Locations and inputs are
/// addressed by index; names are kept for printing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    inputs: Vec<String>,
    propositions: BTreeSet<String>,
    locations: Vec<String>,
    initial: usize,
    /// Distinct output letters; transitions refer to them by index.
    outputs: Vec<PropSet>,
    delta: Vec<Vec<(usize, usize)>>,
}

impl MealyMachine {
    /// Builds a machine from a full transition table
    /// `table[location][input] = (target, output)`.
    pub fn new(
        inputs: Vec<String>,
        propositions: BTreeSet<String>,
        locations: Vec<String>,
        initial: usize,
        table: Vec<Vec<(usize, PropSet)>>,
    ) -> Result<Self, MachineError> {
        if inputs.is_empty() {
            return Err(MachineError::Invalid("empty input alphabet".into()));
        }
        if initial >= locations.len() {
            return Err(MachineError::Invalid(format!(
                "initial location {initial} out of range"
            )));
        }
        if table.len() != locations.len() {
            return Err(MachineError::Invalid(
                "table rows do not match locations".into(),
            ));
        }
        let mut outputs: Vec<PropSet> = Vec::new();
        let mut index: BTreeMap<PropSet, usize> = BTreeMap::new();
        let mut delta = Vec::with_capacity(table.len());
        for (l, row) in table.into_iter().enumerate() {
            if row.len() != inputs.len() {
                return Err(MachineError::NotTotal {
                    location: locations[l].clone(),
                    input: inputs[row.len().min(inputs.len() - 1)].clone(),
                });
            }
            let mut drow = Vec::with_capacity(row.len());
            for (target, out) in row {
                if target >= locations.len() {
                    return Err(MachineError::Invalid(format!(
                        "target {target} out of range"
                    )));
                }
                if let Some(p) = out.iter().find(|p| !propositions.contains(*p)) {
                    return Err(MachineError::UnknownProposition(p.clone()));
                }
                let o = *index.entry(out.clone()).or_insert_with(|| {
                    outputs.push(out);
                    outputs.len() - 1
                });
                drow.push((target, o));
            }
            delta.push(drow);
        }
        Ok(MealyMachine {
            inputs,
            propositions,
            locations,
            initial,
            outputs,
            delta,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn num_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// The distinct output letters used by the transitions.
    pub fn output_letters(&self) -> &[PropSet] {
        &self.outputs
    }

    /// Target location and output-letter index of one transition.
    pub fn step_index(&self, location: usize, input: usize) -> (usize, usize) {
        self.delta[location][input]
    }

    pub fn step(&self, location: usize, input: usize) -> (usize, &PropSet) {
        let (t, o) = self.delta[location][input];
        (t, &self.outputs[o])
    }

    pub fn input_index(&self, name: &str) -> Result<usize, MachineError> {
        self.inputs
            .iter()
            .position(|i| i == name)
            .ok_or_else(|| MachineError::UnknownInput(name.to_string()))
    }

    /// Translates input names into indices.
    pub fn parse_word<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<usize>, MachineError> {
        word.iter().map(|a| self.input_index(a.as_ref())).collect()
    }

    pub fn word_names(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&a| self.inputs[a].clone()).collect()
    }

    /// Output word of `word` from the initial location.
    pub fn run(&self, word: &[usize]) -> Result<Vec<PropSet>, MachineError> {
        let mut loc = self.initial;
        let mut out = Vec::with_capacity(word.len());
        for &a in word {
            if a >= self.inputs.len() {
                return Err(MachineError::UnknownInput(a.to_string()));
            }
            let (t, o) = self.step(loc, a);
            out.push(o.clone());
            loc = t;
        }
        Ok(out)
    }

    /// Location reached after `word`.
    pub fn location_after(&self, word: &[usize]) -> usize {
        word.iter().fold(self.initial, |l, &a| self.delta[l][a].0)
    }

    /// Full transition table with output sets, the inverse of [`Self::new`].
    pub fn table(&self) -> Vec<Vec<(usize, PropSet)>> {
        self.delta
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(t, o)| (t, self.outputs[o].clone()))
                    .collect()
            })
            .collect()
    }

    /// Locations reachable from the initial one, in breadth-first order.
    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.locations.len()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut k = 0;
        while k < order.len() {
            for &(t, _) in &self.delta[order[k]] {
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                }
            }
            k += 1;
        }
        order
    }

    /// Partition of the locations into output-equivalence classes: two
    /// locations share a class iff no input word tells them apart.
    pub fn equivalence_classes(&self) -> Vec<usize> {
        let n = self.locations.len();
        // initial split by the output row
        let mut class = relabel(
            &(0..n)
                .map(|l| self.delta[l].iter().map(|&(_, o)| o).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        );
        loop {
            let sig: Vec<(usize, Vec<usize>)> = (0..n)
                .map(|l| {
                    (
                        class[l],
                        self.delta[l].iter().map(|&(t, _)| class[t]).collect(),
                    )
                })
                .collect();
            let next = relabel(&sig);
            let count = |c: &[usize]| c.iter().collect::<BTreeSet<_>>().len();
            if count(&next) == count(&class) {
                return next;
            }
            class = next;
        }
    }

    /// The minimal machine recognizing the same transduction, with
    /// locations numbered in breadth-first order from the initial one.
    pub fn minimize(&self) -> MealyMachine {
        let class = self.equivalence_classes();
        let reach = self.reachable();
        let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order: Vec<usize> = Vec::new();
        for &l in &reach {
            if let std::collections::btree_map::Entry::Vacant(e) = rep.entry(class[l]) {
                e.insert(order.len());
                order.push(l);
            }
        }
        let table = order
            .iter()
            .map(|&l| {
                self.delta[l]
                    .iter()
                    .map(|&(t, o)| (rep[&class[t]], self.outputs[o].clone()))
                    .collect()
            })
            .collect();
        let names = (0..order.len()).map(|i| format!("l{i}")).collect();
        MealyMachine::new(
            self.inputs.clone(),
            self.propositions.clone(),
            names,
            0,
            table,
        )
        .expect("minimized machine is well formed")
    }

    pub fn is_minimal(&self) -> bool {
        self.minimize().num_locations() == self.num_locations()
    }

    /// Whether both machines have the same alphabet and are identical up
    /// to renaming of reachable locations.
    pub fn is_isomorphic(&self, other: &MealyMachine) -> bool {
        if self.inputs != other.inputs {
            return false;
        }
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut back: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        map.insert(self.initial, other.initial);
        back.insert(other.initial, self.initial);
        while let Some((a, b)) = queue.pop_front() {
            for i in 0..self.inputs.len() {
                let (ta, oa) = self.step(a, i);
                let (tb, ob) = other.step(b, i);
                if oa != ob {
                    return false;
                }
                match (map.get(&ta), back.get(&tb)) {
                    (Some(&x), Some(&y)) if x == tb && y == ta => {}
                    (None, None) => {
                        map.insert(ta, tb);
                        back.insert(tb, ta);
                        queue.push_back((ta, tb));
                    }
                    _ => return false,
                }
            }
        }
        map.len() == self.reachable().len() && back.len() == other.reachable().len()
    }

    /// A shortest word whose outputs differ when started from location `a`
    /// of `self` and location `b` of `other`.
    pub fn separating_word(&self, a: usize, other: &MealyMachine, b: usize) -> Option<Vec<usize>> {
        let k = self.inputs.len().min(other.inputs.len());
        type Pair = (usize, usize);
        // pair -> (predecessor pair, letter)
        let mut parent: BTreeMap<Pair, Option<(Pair, usize)>> = BTreeMap::new();
        parent.insert((a, b), None);
        let mut queue = VecDeque::from([(a, b)]);
        let path = |parent: &BTreeMap<Pair, Option<(Pair, usize)>>, mut node: Pair, last: usize| {
            let mut w = vec![last];
            while let Some(Some((p, i))) = parent.get(&node) {
                w.push(*i);
                node = *p;
            }
            w.reverse();
            w
        };
        while let Some((x, y)) = queue.pop_front() {
            for i in 0..k {
                let (tx, ox) = self.step(x, i);
                let (ty, oy) = other.step(y, i);
                if ox != oy {
                    return Some(path(&parent, (x, y), i));
                }
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry((tx, ty)) {
                    e.insert(Some(((x, y), i)));
                    queue.push_back((tx, ty));
                }
            }
        }
        None
    }

    /// A shortest input word on which the two machines produce different
    /// outputs, if any.
    pub fn distinguishing_word(&self, other: &MealyMachine) -> Option<Vec<usize>> {
        self.separating_word(self.initial, other, other.initial)
    }
}

fn relabel<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut ids: BTreeMap<T, usize> = BTreeMap::new();
    keys.iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k.clone()).or_insert(next)
        })
        .collect()
}
