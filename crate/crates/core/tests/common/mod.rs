//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use bbcheck::formula::{parse_formula, Formula, Interval, PropSet};
use bbcheck::machine::{load_machine, MealyMachine};
use proptest::prelude::*;
use rand::Rng;

pub fn props(names: &[&str]) -> PropSet {
    names.iter().map(|s| s.to_string()).collect()
}

/// Direct recursive reading of the finite-trace semantics, kept apart from
/// the library evaluator so the two can be compared.
pub fn naive_eval(f: &Formula, t: &[PropSet], k: usize) -> bool {
    let n = t.len();
    let in_iv = |iv: &Interval, d: usize| {
        let d = d as u64;
        d >= iv.lo() && iv.hi().is_none_or(|h| d < h)
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => t[k].contains(p),
        Formula::Cmp(_) => panic!("naive_eval is propositional"),
        Formula::Not(a) => !naive_eval(a, t, k),
        Formula::And(a, b) => naive_eval(a, t, k) && naive_eval(b, t, k),
        Formula::Or(a, b) => naive_eval(a, t, k) || naive_eval(b, t, k),
        Formula::Implies(a, b) => !naive_eval(a, t, k) || naive_eval(b, t, k),
        Formula::Next(a) => k + 1 < n && naive_eval(a, t, k + 1),
        Formula::Eventually(iv, a) => (k..n).any(|j| in_iv(iv, j - k) && naive_eval(a, t, j)),
        Formula::Globally(iv, a) => (k..n).all(|j| !in_iv(iv, j - k) || naive_eval(a, t, j)),
        Formula::Until(iv, a, b) => (k..n).any(|j| {
            in_iv(iv, j - k) && naive_eval(b, t, j) && (k..=j).all(|m| naive_eval(a, t, m))
        }),
        Formula::Release(iv, a, b) => {
            let until = Formula::Until(
                *iv,
                Box::new(Formula::not((**a).clone())),
                Box::new(Formula::not((**b).clone())),
            );
            !naive_eval(&until, t, k)
        }
    }
}

fn random_interval(rng: &mut impl Rng) -> Interval {
    let lo = rng.gen_range(0..3);
    if rng.gen_bool(0.3) {
        Interval::from(lo)
    } else {
        Interval::bounded(lo, lo + rng.gen_range(1..4))
    }
}

/// A random propositional formula of depth at most `depth` over `aps`.
pub fn random_formula(rng: &mut impl Rng, depth: usize, aps: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(aps[rng.gen_range(0..aps.len())]),
        };
    }
    let sub = |rng: &mut _| random_formula(rng, depth - 1, aps);
    match rng.gen_range(0..9) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::next(sub(rng)),
        5 => Formula::until(random_interval(rng), sub(rng), sub(rng)),
        6 => Formula::release(random_interval(rng), sub(rng), sub(rng)),
        7 => Formula::eventually(random_interval(rng), sub(rng)),
        _ => Formula::globally(random_interval(rng), sub(rng)),
    }
}

/// Intervals with lower bound at most `max_lo`.
pub fn arb_interval(max_lo: u64) -> impl Strategy<Value = Interval> + Clone {
    prop_oneof![
        (0..=max_lo).prop_map(Interval::from),
        (0..=max_lo, 1u64..4).prop_map(|(lo, w)| Interval::bounded(lo, lo + w)),
    ]
}

/// Propositional formulas over `p` and `q`.
pub fn arb_formula(depth: u32) -> impl Strategy<Value = Formula> {
    arb_formula_with(depth, 2)
}

/// Propositional formulas whose intervals start at most `max_lo` steps ahead.
pub fn arb_formula_with(depth: u32, max_lo: u64) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
    ];
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let iv = arb_interval(max_lo);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            inner.clone().prop_map(Formula::next),
            (iv.clone(), inner.clone(), inner.clone())
                .prop_map(|(i, a, b)| Formula::until(i, a, b)),
            (iv.clone(), inner.clone(), inner.clone())
                .prop_map(|(i, a, b)| Formula::release(i, a, b)),
            (iv.clone(), inner.clone()).prop_map(|(i, a)| Formula::eventually(i, a)),
            (iv, inner).prop_map(|(i, a)| Formula::globally(i, a)),
        ]
    })
}

/// Traces over `p` and `q` of length 1 to 6.
pub fn arb_trace() -> impl Strategy<Value = Vec<PropSet>> {
    prop::collection::vec((any::<bool>(), any::<bool>()), 1..=6).prop_map(|v| {
        v.into_iter()
            .map(|(p, q)| {
                let mut s = PropSet::new();
                if p {
                    s.insert("p".into());
                }
                if q {
                    s.insert("q".into());
                }
                s
            })
            .collect()
    })
}

/// Every subset of `aps`.
pub fn powerset(aps: &[&str]) -> Vec<PropSet> {
    (0..1usize << aps.len())
        .map(|mask| {
            aps.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.to_string())
                .collect()
        })
        .collect()
}

/// A random complete machine with outputs over `aps`.
pub fn random_machine(
    rng: &mut impl Rng,
    states: usize,
    inputs: usize,
    aps: &[&str],
) -> MealyMachine {
    let letters = powerset(aps);
    let table = (0..states)
        .map(|_| {
            (0..inputs)
                .map(|_| {
                    (
                        rng.gen_range(0..states),
                        letters[rng.gen_range(0..letters.len())].clone(),
                    )
                })
                .collect()
        })
        .collect();
    MealyMachine::new(
        (0..inputs).map(|a| format!("i{a}")).collect(),
        aps.iter().map(|s| s.to_string()).collect(),
        (0..states).map(|l| format!("s{l}")).collect(),
        0,
        table,
    )
    .unwrap()
}

pub fn arb_machine(max_states: usize, max_inputs: usize) -> impl Strategy<Value = MealyMachine> {
    (1..=max_states, 1..=max_inputs, any::<u64>()).prop_map(|(n, k, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        random_machine(&mut rng, n, k, &["p", "q"])
    })
}

/// Runs `word` through `m` with its own table walk.
pub fn outputs_of(m: &MealyMachine, word: &[usize]) -> Vec<PropSet> {
    let mut loc = m.initial();
    word.iter()
        .map(|&a| {
            let (t, o) = m.step(loc, a);
            loc = t;
            o.clone()
        })
        .collect()
}

/// All words of length `1..=h` in length-lexicographic order.
pub fn all_words(inputs: usize, h: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..h {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..inputs).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// The first violating word in length-lexicographic order, by enumeration.
pub fn brute_force_violation(m: &MealyMachine, f: &Formula, h: usize) -> Option<Vec<usize>> {
    all_words(m.inputs().len(), h)
        .into_iter()
        .find(|w| !naive_eval(f, &outputs_of(m, w), 0))
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// A planted-bug machine together with the formula from its header.
pub struct Planted {
    pub name: String,
    pub machine: MealyMachine,
    pub formula: Formula,
}

pub fn planted_fixtures() -> Vec<Planted> {
    let mut paths: Vec<PathBuf> = fs::read_dir(fixture_dir().join("planted"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "mealy"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let formula = text
                .lines()
                .find_map(|l| l.strip_prefix("# formula: "))
                .unwrap_or_else(|| panic!("{} has no formula header", p.display()));
            Planted {
                name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                machine: load_machine(&text).unwrap(),
                formula: parse_formula(formula).unwrap(),
            }
        })
        .collect()
}

/// Set of atoms of a formula, for trace enumeration.
pub fn atoms(f: &Formula) -> BTreeSet<String> {
    f.propositions()
}

/// Learns `m` with the W-method oracle until no counterexample is left.
pub fn learn_with_wmethod(
    m: &MealyMachine,
    depth: usize,
) -> (MealyMachine, bbcheck::sut::SutSession) {
    use bbcheck::learn::ObservationTable;
    use bbcheck::search::wmethod_eqtest;
    use bbcheck::sut::{MealySut, SutSession};

    let mut sut = SutSession::new(Box::new(MealySut::new(m.clone())), None);
    let mut table = ObservationTable::new(m.inputs().to_vec(), m.propositions().clone());
    let mut hyp = table.learn_hypothesis(&mut sut).unwrap();
    while let Some(w) = wmethod_eqtest(&mut sut, &hyp, depth).unwrap() {
        table.refine_with_counterexample(&w, &mut sut).unwrap();
        hyp = table.learn_hypothesis(&mut sut).unwrap();
    }
    (hyp, sut)
}
