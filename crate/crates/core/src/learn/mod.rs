//! Active learning of Mealy machines with an Angluin-style observation
//! table.
//!
//! Rows are indexed by input prefixes and columns by non-empty suffixes.
//! The cell of `(s, e)` is the last output letter of the word `s·e`.
//! Counterexamples are handled by adding all of their prefixes to the
//! row set.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::formula::PropSet;
use crate::machine::MealyMachine;
use crate::sut::{SutError, SutSession};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error(transparent)]
    Teacher(#[from] SutError),
    #[error("not a counterexample: hypothesis and system agree on `{0}`")]
    NotACounterexample(String),
    #[error("the teacher returned {got} outputs for a word of length {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Answers membership queries: the output word of an input word.
pub trait Teacher {
    fn inputs(&self) -> Vec<String>;

    fn propositions(&self) -> BTreeSet<String>;

    fn query(&mut self, word: &[usize]) -> Result<Vec<PropSet>, SutError>;
}

impl Teacher for SutSession {
    fn inputs(&self) -> Vec<String> {
        SutSession::inputs(self).to_vec()
    }

    fn propositions(&self) -> BTreeSet<String> {
        SutSession::propositions(self)
    }

    fn query(&mut self, word: &[usize]) -> Result<Vec<PropSet>, SutError> {
        SutSession::query(self, word)
    }
}

/// A known machine answers queries directly.
impl Teacher for MealyMachine {
    fn inputs(&self) -> Vec<String> {
        MealyMachine::inputs(self).to_vec()
    }

    fn propositions(&self) -> BTreeSet<String> {
        MealyMachine::propositions(self).clone()
    }

    fn query(&mut self, word: &[usize]) -> Result<Vec<PropSet>, SutError> {
        self.run(word)
            .map_err(|e| SutError::Protocol(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct ObservationTable {
    inputs: Vec<String>,
    propositions: BTreeSet<String>,
    prefixes: Vec<Vec<usize>>,
    prefix_set: HashSet<Vec<usize>>,
    suffixes: Vec<Vec<usize>>,
    /// Interned output letters.
    letters: Vec<PropSet>,
    letter_ids: HashMap<PropSet, usize>,
    /// Filled cells of each row, one letter id per suffix.
    rows: HashMap<Vec<usize>, Vec<usize>>,
    hypothesis: Option<MealyMachine>,
}

impl ObservationTable {
    /// An empty table with `S = {ε}` and `E = Σ`.
    pub fn new(inputs: Vec<String>, propositions: BTreeSet<String>) -> Self {
        let suffixes = (0..inputs.len()).map(|a| vec![a]).collect();
        ObservationTable {
            inputs,
            propositions,
            prefixes: vec![vec![]],
            prefix_set: HashSet::from([vec![]]),
            suffixes,
            letters: Vec::new(),
            letter_ids: HashMap::new(),
            rows: HashMap::new(),
            hypothesis: None,
        }
    }

    pub fn for_teacher(teacher: &dyn Teacher) -> Self {
        ObservationTable::new(teacher.inputs(), teacher.propositions())
    }

    pub fn prefixes(&self) -> &[Vec<usize>] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[Vec<usize>] {
        &self.suffixes
    }

    /// The most recent hypothesis.
    pub fn hypothesis(&self) -> Option<&MealyMachine> {
        self.hypothesis.as_ref()
    }

    /// Number of distinct rows among the prefixes.
    pub fn distinct_rows(&self) -> usize {
        self.prefixes
            .iter()
            .filter_map(|s| self.rows.get(s))
            .collect::<HashSet<_>>()
            .len()
    }

    fn letter(&mut self, out: PropSet) -> usize {
        if let Some(&i) = self.letter_ids.get(&out) {
            return i;
        }
        self.letters.push(out.clone());
        self.letter_ids.insert(out, self.letters.len() - 1);
        self.letters.len() - 1
    }

    fn fill_row(&mut self, u: &[usize], teacher: &mut dyn Teacher) -> Result<(), LearnError> {
        let have = self.rows.get(u).map_or(0, Vec::len);
        for k in have..self.suffixes.len() {
            let mut w = u.to_vec();
            w.extend_from_slice(&self.suffixes[k]);
            let out = teacher.query(&w)?;
            if out.len() != w.len() {
                return Err(LearnError::LengthMismatch {
                    expected: w.len(),
                    got: out.len(),
                });
            }
            let id = self.letter(out.last().expect("suffixes are non-empty").clone());
            self.rows.entry(u.to_vec()).or_default().push(id);
        }
        Ok(())
    }

    fn fill(&mut self, teacher: &mut dyn Teacher) -> Result<(), LearnError> {
        for s in self.prefixes.clone() {
            self.fill_row(&s, teacher)?;
            for a in 0..self.inputs.len() {
                let mut u = s.clone();
                u.push(a);
                self.fill_row(&u, teacher)?;
            }
        }
        Ok(())
    }

    fn add_prefix(&mut self, s: Vec<usize>) {
        if self.prefix_set.insert(s.clone()) {
            self.prefixes.push(s);
        }
    }

    fn extend(s: &[usize], a: usize) -> Vec<usize> {
        let mut u = s.to_vec();
        u.push(a);
        u
    }

    /// A one-letter extension whose row matches no prefix row.
    fn unclosed(&self) -> Option<Vec<usize>> {
        let known: HashSet<&Vec<usize>> = self.prefixes.iter().map(|s| &self.rows[s]).collect();
        self.prefixes.iter().find_map(|s| {
            (0..self.inputs.len())
                .map(|a| Self::extend(s, a))
                .find(|u| !known.contains(&self.rows[u]))
        })
    }

    /// A new suffix `a·e` separating two prefixes with equal rows. Pairs
    /// are visited in prefix order so that learning is deterministic.
    fn inconsistency(&self) -> Option<Vec<usize>> {
        let mut first_with_row: HashMap<&Vec<usize>, &Vec<usize>> = HashMap::new();
        for s in &self.prefixes {
            let Some(&first) = first_with_row.get(&self.rows[s]) else {
                first_with_row.insert(&self.rows[s], s);
                continue;
            };
            for a in 0..self.inputs.len() {
                let r1 = &self.rows[&Self::extend(first, a)];
                let r2 = &self.rows[&Self::extend(s, a)];
                if let Some(k) = (0..self.suffixes.len()).find(|&k| r1[k] != r2[k]) {
                    let mut e = vec![a];
                    e.extend_from_slice(&self.suffixes[k]);
                    return Some(e);
                }
            }
        }
        None
    }

    /// Makes the table closed and consistent, then builds the hypothesis
    /// whose states are the distinct prefix rows.
    pub fn learn_hypothesis(
        &mut self,
        teacher: &mut dyn Teacher,
    ) -> Result<MealyMachine, LearnError> {
        loop {
            self.fill(teacher)?;
            if let Some(u) = self.unclosed() {
                self.add_prefix(u);
                continue;
            }
            if let Some(e) = self.inconsistency() {
                self.suffixes.push(e);
                continue;
            }
            break;
        }
        let h = self.build();
        self.hypothesis = Some(h.clone());
        Ok(h)
    }

    fn build(&self) -> MealyMachine {
        let mut state_of: HashMap<&Vec<usize>, usize> = HashMap::new();
        let mut reps: Vec<&Vec<usize>> = Vec::new();
        for s in &self.prefixes {
            let row = &self.rows[s];
            if !state_of.contains_key(row) {
                state_of.insert(row, reps.len());
                reps.push(s);
            }
        }
        let table = reps
            .iter()
            .map(|s| {
                (0..self.inputs.len())
                    .map(|a| {
                        let own = &self.rows[*s];
                        let next = &self.rows[&Self::extend(s, a)];
                        // column `a` holds the output of the letter itself
                        (state_of[next], self.letters[own[a]].clone())
                    })
                    .collect()
            })
            .collect();
        let mut props = self.propositions.clone();
        props.extend(self.letters.iter().flatten().cloned());
        let names = (0..reps.len()).map(|i| format!("q{i}")).collect();
        MealyMachine::new(self.inputs.clone(), props, names, 0, table)
            .expect("closed table gives a total machine")
    }

    /// Adds every prefix of the counterexample `w` to the row set. Fails
    /// when the current hypothesis already agrees with the teacher on `w`.
    pub fn refine_with_counterexample(
        &mut self,
        w: &[usize],
        teacher: &mut dyn Teacher,
    ) -> Result<(), LearnError> {
        let expected = teacher.query(w)?;
        let agrees = match &self.hypothesis {
            Some(h) => h.run(w).ok().as_ref() == Some(&expected),
            None => false,
        };
        if agrees {
            return Err(LearnError::NotACounterexample(
                w.iter()
                    .map(|&a| self.inputs[a].as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            ));
        }
        for k in 1..=w.len() {
            self.add_prefix(w[..k].to_vec());
        }
        Ok(())
    }
}
