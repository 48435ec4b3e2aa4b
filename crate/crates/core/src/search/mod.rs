//! Equivalence testing: searching for an input word on which the system
//! and the hypothesis disagree.
//!
//! Every strategy compares mapped system outputs against the hypothesis
//! and returns the shortest disagreeing prefix of the first disagreeing
//! word it executes.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{robustness, Formula, FormulaError};
use crate::machine::MealyMachine;
use crate::sut::{SutError, SutSession};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Sut(#[from] SutError),
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
    #[error("robustness-guided search needs numeric outputs")]
    NotNumeric,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub seed: u64,
    /// Word budget of one random-testing round.
    pub max_words: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    /// Extra states assumed by the W-method.
    pub wmethod_depth: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            seed: 0,
            max_words: 1000,
            min_len: 1,
            max_len: 30,
            population: 50,
            generations: 20,
            mutation_rate: 0.05,
            crossover_rate: 0.5,
            wmethod_depth: 2,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidParams(m.into()));
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return bad("word lengths must satisfy 1 <= min <= max");
        }
        for (name, r) in [
            ("mutation", self.mutation_rate),
            ("crossover", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(SearchError::InvalidParams(format!(
                    "{name} rate {r} outside [0,1]"
                )));
            }
        }
        Ok(())
    }
}

fn random_word(k: usize, p: &SearchParams, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let len = rng.gen_range(p.min_len..=p.max_len);
    (0..len).map(|_| rng.gen_range(0..k)).collect()
}

/// Runs `w` on both sides; on disagreement returns the shortest prefix
/// of `w` that already disagrees.
fn disagreement(
    sut: &mut SutSession,
    hyp: &MealyMachine,
    w: &[usize],
) -> Result<Option<Vec<usize>>, SearchError> {
    let got = sut.query(w)?;
    let want = hyp.run(w).map_err(|e| SutError::Protocol(e.to_string()))?;
    Ok(got
        .iter()
        .zip(&want)
        .position(|(a, b)| a != b)
        .map(|k| w[..=k].to_vec()))
}

/// Uniform random testing with at most `max_words` words.
pub fn random_eqtest(
    sut: &mut SutSession,
    hyp: &MealyMachine,
    p: &SearchParams,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<usize>>, SearchError> {
    p.validate()?;
    let k = sut.inputs().len();
    for _ in 0..p.max_words {
        let w = random_word(k, p, rng);
        if let Some(cex) = disagreement(sut, hyp, &w)? {
            return Ok(Some(cex));
        }
    }
    Ok(None)
}

struct Scored {
    word: Vec<usize>,
    fitness: f64,
}

/// Robustness-guided genetic search. Words whose numeric output trace has
/// low robustness against `f` are preferred. At most
/// `population * (generations + 1)` words are evaluated.
pub fn ga_eqtest(
    sut: &mut SutSession,
    hyp: &MealyMachine,
    f: &Formula,
    p: &SearchParams,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<usize>>, SearchError> {
    p.validate()?;
    let k = sut.inputs().len();
    let evaluate = |sut: &mut SutSession,
                    word: Vec<usize>|
     -> Result<Result<Scored, Vec<usize>>, SearchError> {
        let exec = sut.execute(&word)?;
        if !exec.is_numeric() {
            return Err(SearchError::NotNumeric);
        }
        let want = hyp
            .run(&word)
            .map_err(|e| SutError::Protocol(e.to_string()))?;
        if let Some(i) = exec.mapped.iter().zip(&want).position(|(a, b)| a != b) {
            return Ok(Err(word[..=i].to_vec()));
        }
        let trace = exec.raw_trace().ok_or(SearchError::NotNumeric)?;
        let fitness = robustness(f, &trace, 0)?;
        Ok(Ok(Scored { word, fitness }))
    };

    let mut pop = Vec::with_capacity(p.population);
    for _ in 0..p.population {
        let w = random_word(k, p, rng);
        match evaluate(sut, w)? {
            Ok(s) => pop.push(s),
            Err(cex) => return Ok(Some(cex)),
        }
    }
    for _ in 0..p.generations {
        let best = (0..pop.len())
            .min_by(|&a, &b| pop[a].fitness.total_cmp(&pop[b].fitness))
            .expect("population is non-empty");
        let mut next = vec![Scored {
            word: pop[best].word.clone(),
            fitness: pop[best].fitness,
        }];
        while next.len() < p.population {
            let pick = |rng: &mut ChaCha8Rng| {
                let (a, b) = (rng.gen_range(0..pop.len()), rng.gen_range(0..pop.len()));
                if pop[a].fitness <= pop[b].fitness {
                    a
                } else {
                    b
                }
            };
            let (x, y) = (pick(rng), pick(rng));
            let mut child = pop[x].word.clone();
            if rng.gen_bool(p.crossover_rate) {
                let other = &pop[y].word;
                let cut_a = rng.gen_range(0..=child.len());
                let cut_b = rng.gen_range(0..=other.len());
                child.truncate(cut_a);
                child.extend_from_slice(&other[cut_b..]);
                child.truncate(p.max_len);
                while child.len() < p.min_len {
                    child.push(rng.gen_range(0..k));
                }
            }
            for letter in child.iter_mut() {
                if rng.gen_bool(p.mutation_rate) {
                    *letter = rng.gen_range(0..k);
                }
            }
            match evaluate(sut, child)? {
                Ok(s) => next.push(s),
                Err(cex) => return Ok(Some(cex)),
            }
        }
        pop = next;
    }
    Ok(None)
}

/// Shortest access word of every reachable location.
fn access_words(m: &MealyMachine) -> Vec<Vec<usize>> {
    let mut words: Vec<Option<Vec<usize>>> = vec![None; m.num_locations()];
    words[m.initial()] = Some(vec![]);
    let mut queue = VecDeque::from([m.initial()]);
    let mut order = vec![m.initial()];
    while let Some(l) = queue.pop_front() {
        for a in 0..m.inputs().len() {
            let (t, _) = m.step(l, a);
            if words[t].is_none() {
                let mut w = words[l].clone().expect("visited");
                w.push(a);
                words[t] = Some(w);
                order.push(t);
                queue.push_back(t);
            }
        }
    }
    order
        .into_iter()
        .map(|l| words[l].clone().expect("reachable"))
        .collect()
}

/// A characterizing set: every letter plus a shortest separating word for
/// each pair of inequivalent reachable locations.
fn characterizing_set(m: &MealyMachine) -> Vec<Vec<usize>> {
    let mut set: BTreeSet<Vec<usize>> = (0..m.inputs().len()).map(|a| vec![a]).collect();
    let reach = m.reachable();
    for (i, &x) in reach.iter().enumerate() {
        for &y in &reach[i + 1..] {
            if let Some(w) = m.separating_word(x, m, y) {
                set.insert(w);
            }
        }
    }
    set.into_iter().collect()
}

/// The W-method test suite `P · Σ^≤depth · W`, ordered by length, where
/// `P` is the transition cover of `hyp`. It is complete for systems with
/// at most `|hyp| + depth` states.
pub fn wmethod_suite(hyp: &MealyMachine, depth: usize) -> Vec<Vec<usize>> {
    let k = hyp.inputs().len();
    let access = access_words(hyp);
    let mut cover = access.clone();
    for w in &access {
        for a in 0..k {
            let mut u = w.clone();
            u.push(a);
            cover.push(u);
        }
    }
    let mut middles: Vec<Vec<usize>> = vec![vec![]];
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut u = w.clone();
                    u.push(a);
                    u
                })
            })
            .collect();
        middles.extend(layer.iter().cloned());
    }
    let w_set = characterizing_set(hyp);
    let mut seen = HashSet::new();
    let mut suite = Vec::new();
    for p in &cover {
        for m in &middles {
            for e in &w_set {
                let mut w = p.clone();
                w.extend_from_slice(m);
                w.extend_from_slice(e);
                if seen.insert(w.clone()) {
                    suite.push(w);
                }
            }
        }
    }
    suite.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    suite
}

/// Runs the W-method suite; `None` means equivalence under the state bound.
pub fn wmethod_eqtest(
    sut: &mut SutSession,
    hyp: &MealyMachine,
    depth: usize,
) -> Result<Option<Vec<usize>>, SearchError> {
    for w in wmethod_suite(hyp, depth) {
        if let Some(cex) = disagreement(sut, hyp, &w)? {
            return Ok(Some(cex));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::machine::load_machine;
    use crate::sut::{MealySut, OutputMapper, TransmissionParams, TransmissionSim};
    use rand::SeedableRng;

    const THREE: &str = "\
inputs: a b
propositions: p q
initial: l0
l0 --a/{p}--> l1
l0 --b/{}--> l0
l1 --a/{p q}--> l2
l1 --b/{q}--> l0
l2 --a/{}--> l2
l2 --b/{p}--> l1
";

    fn session(m: &MealyMachine) -> SutSession {
        SutSession::new(Box::new(MealySut::new(m.clone())), None)
    }

    fn flipped(m: &MealyMachine, loc: usize, input: usize) -> MealyMachine {
        let mut table = m.table();
        let out = &mut table[loc][input].1;
        if out.contains("p") {
            out.remove("p");
        } else {
            out.insert("p".into());
        }
        MealyMachine::new(
            m.inputs().to_vec(),
            m.propositions().clone(),
            m.locations().to_vec(),
            m.initial(),
            table,
        )
        .unwrap()
    }

    #[test]
    fn identical_machines_have_no_counterexample() {
        let m = load_machine(THREE).unwrap();
        let p = SearchParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            random_eqtest(&mut session(&m), &m, &p, &mut rng).unwrap(),
            None
        );
        assert_eq!(wmethod_eqtest(&mut session(&m), &m, 2).unwrap(), None);
        let zero = SearchParams { max_words: 0, ..p };
        let other = flipped(&m, 0, 0);
        assert_eq!(
            random_eqtest(&mut session(&other), &m, &zero, &mut rng).unwrap(),
            None
        );
    }

    #[test]
    fn flipped_output_is_found() {
        let m = load_machine(THREE).unwrap();
        for loc in 0..3 {
            for a in 0..2 {
                let sut = flipped(&m, loc, a);
                let w = wmethod_eqtest(&mut session(&sut), &m, 0)
                    .unwrap()
                    .expect("a counterexample");
                assert_ne!(sut.run(&w).unwrap(), m.run(&w).unwrap());
                // the last letter exercises the flipped transition
                assert_eq!(m.location_after(&w[..w.len() - 1]), loc);
                assert_eq!(*w.last().unwrap(), a);
            }
        }
    }

    #[test]
    fn random_testing_returns_short_prefixes_and_is_deterministic() {
        let m = load_machine(THREE).unwrap();
        let mut table = m.table();
        for row in &mut table {
            for cell in row.iter_mut() {
                cell.1.insert("q".into());
                cell.1.insert("p".into());
            }
        }
        // outputs {p q} everywhere, which differs from m on every length-1 word
        let sut = MealyMachine::new(
            m.inputs().to_vec(),
            m.propositions().clone(),
            m.locations().to_vec(),
            0,
            table,
        )
        .unwrap();
        let p = SearchParams::default();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_eqtest(&mut session(&sut), &m, &p, &mut rng).unwrap()
        };
        let w = run(3).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(run(3), Some(w));
    }

    #[test]
    fn ga_rejects_propositional_systems() {
        let m = load_machine(THREE).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = parse_formula("G p").unwrap();
        let err = ga_eqtest(&mut session(&m), &m, &f, &SearchParams::default(), &mut rng);
        assert_eq!(err, Err(SearchError::NotNumeric));
    }

    #[test]
    fn ga_budget_and_zero_generations() {
        let f = parse_formula("G (v < 1000)").unwrap();
        let mapper = OutputMapper::from_formula(&f).unwrap();
        // hypothesis: always below 1000, which the simulator never exceeds
        let hyp = load_machine(
            "inputs: idle accel brake both\npropositions: v<1000 v>=1000\ninitial: s\n\
             s --idle/{v<1000}--> s\ns --accel/{v<1000}--> s\ns --brake/{v<1000}--> s\ns --both/{v<1000}--> s\n",
        )
        .unwrap();
        for generations in [0, 3] {
            let p = SearchParams {
                population: 6,
                generations,
                ..SearchParams::default()
            };
            let mut sut = SutSession::new(
                Box::new(TransmissionSim::new(TransmissionParams::default())),
                Some(mapper.clone()),
            );
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            assert_eq!(ga_eqtest(&mut sut, &hyp, &f, &p, &mut rng).unwrap(), None);
            assert!(sut.executions() <= (p.population * (p.generations + 1)) as u64);
        }
    }

    #[test]
    fn invalid_params() {
        let p = SearchParams {
            population: 1,
            ..SearchParams::default()
        };
        assert!(p.validate().is_err());
        let p = SearchParams {
            mutation_rate: 1.5,
            ..SearchParams::default()
        };
        assert!(p.validate().is_err());
    }
}
