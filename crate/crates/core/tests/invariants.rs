//! Property tests for the formula, strengthening, machine, learning and
//! system-under-test layers.

mod common;

use bbcheck::formula::{
    eval_at_end, evaluate, evaluate_all, parse_formula, progress, robustness, to_nnf, Formula,
    Letter, Trace, Valuation,
};
use bbcheck::machine::{model_check, Verdict, DEFAULT_CAP};
use bbcheck::search::wmethod_eqtest;
use bbcheck::strengthen::{rule_instances, semantically_stronger_oracle, syntactically_stronger};
use bbcheck::sut::{MealySut, OutputMapper, SutSession};
use common::*;
use proptest::prelude::*;

fn trace(t: &[bbcheck::formula::PropSet]) -> Trace {
    Trace::from_props(t.iter().cloned()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn evaluator_matches_direct_semantics(f in arb_formula(3), t in arb_trace()) {
        let got = evaluate_all(&f, &trace(&t)).unwrap();
        for (k, v) in got.into_iter().enumerate() {
            prop_assert_eq!(v, naive_eval(&f, &t, k), "{} at {}", f, k);
        }
    }

    #[test]
    fn progression_agrees_with_evaluation(f in arb_formula(3), t in arb_trace()) {
        let mut g = to_nnf(&f);
        for letter in &t {
            g = progress(&g, &Letter::Props(letter.clone())).unwrap();
        }
        prop_assert_eq!(eval_at_end(&g), naive_eval(&f, &t, 0), "{}", f);
    }

    #[test]
    fn nnf_and_its_negation_are_equivalent(f in arb_formula(3), t in arb_trace()) {
        let n = to_nnf(&f);
        let g = n.to_formula();
        let neg = n.negate().to_formula();
        for k in 0..t.len() {
            prop_assert_eq!(naive_eval(&g, &t, k), naive_eval(&f, &t, k), "{}", g);
            prop_assert_eq!(naive_eval(&neg, &t, k), !naive_eval(&f, &t, k), "{}", neg);
        }
    }

    #[test]
    fn display_round_trips(f in arb_formula(3)) {
        let back = parse_formula(&f.to_string()).unwrap();
        prop_assert_eq!(back.to_string(), f.to_string());
    }

    #[test]
    fn robustness_sign_decides_satisfaction(
        f in arb_formula(3),
        samples in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=6),
    ) {
        // p becomes x > 0 and q becomes y < 0.5
        let f = f.map_atoms(&mut |a| match a {
            Formula::Atom(p) if p == "p" => parse_formula("x > 0").unwrap(),
            Formula::Atom(_) => parse_formula("y < 0.5").unwrap(),
            other => other.clone(),
        });
        let vals: Vec<Valuation> = samples
            .iter()
            .map(|&(x, y)| [("x".to_string(), x), ("y".to_string(), y)].into_iter().collect())
            .collect();
        let t = Trace::from_values(vals).unwrap();
        for k in 0..t.len() {
            let r = robustness(&f, &t, k).unwrap();
            let sat = evaluate(&f, &t, k).unwrap();
            if r > 0.0 {
                prop_assert!(sat, "{} at {}: robustness {}", f, k, r);
            }
            if r < 0.0 {
                prop_assert!(!sat, "{} at {}: robustness {}", f, k, r);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// With every interval anchored at the current position, each one-step
    /// strengthening implies the original formula.
    #[test]
    fn anchored_rule_instances_are_sound(f in arb_formula_with(3, 0)) {
        let aps = props(&["p", "q"]);
        for (rule, psi) in rule_instances(&f) {
            prop_assert!(
                semantically_stronger_oracle(&f, &psi, &aps, 5).unwrap(),
                "rule {}: {} does not imply {}", rule, psi, f
            );
        }
    }

    #[test]
    fn comparator_is_sound(a in arb_formula(2), b in arb_formula(2)) {
        if syntactically_stronger(&a, &b) {
            prop_assert!(semantically_stronger_oracle(&a, &b, &props(&["p", "q"]), 5).unwrap(), "{} vs {}", a, b);
        }
    }

    #[test]
    fn comparator_is_irreflexive(f in arb_formula(3)) {
        prop_assert!(!syntactically_stronger(&f, &f));
    }

    /// The comparator is not closed under composition, but chains of it
    /// remain sound, so its transitive closure is a valid strength order.
    #[test]
    fn comparator_chains_stay_sound(f in arb_formula_with(2, 0)) {
        let aps = props(&["p", "q"]);
        let mut pool = vec![f.clone()];
        for (_, g) in rule_instances(&f) {
            pool.extend(rule_instances(&g).into_iter().map(|(_, h)| h));
            pool.push(g);
        }
        pool.truncate(30);
        for a in &pool {
            for b in pool.iter().filter(|b| syntactically_stronger(a, b)) {
                for c in pool.iter().filter(|c| syntactically_stronger(b, c)) {
                    prop_assert!(semantically_stronger_oracle(a, c, &aps, 4).unwrap(), "{} < {} < {}", a, b, c);
                }
            }
        }
    }

    #[test]
    fn model_checker_matches_enumeration(m in arb_machine(4, 2), f in arb_formula(2), h in 1usize..=5) {
        let expected = brute_force_violation(&m, &f, h);
        match model_check(&m, &f, h, DEFAULT_CAP).unwrap() {
            Verdict::Holds => prop_assert_eq!(expected, None, "{}", f),
            Verdict::Violated { witness, outputs } => {
                prop_assert_eq!(Some(witness.clone()), expected, "{}", f);
                prop_assert_eq!(outputs, outputs_of(&m, &witness));
            }
            Verdict::Inconclusive(why) => prop_assert!(false, "inconclusive: {}", why),
        }
    }

    #[test]
    fn learned_machine_is_equivalent(m in arb_machine(5, 3)) {
        let (hyp, _) = learn_with_wmethod(&m, 2);
        let target = m.minimize();
        prop_assert_eq!(hyp.distinguishing_word(&m), None);
        prop_assert!(hyp.num_locations() <= target.num_locations());
    }

    #[test]
    fn cache_is_transparent(m in arb_machine(4, 3), words in prop::collection::vec(prop::collection::vec(0usize..3, 1..8), 1..20)) {
        let k = m.inputs().len();
        let mut cached = SutSession::new(Box::new(MealySut::new(m.clone())), None);
        let mut plain = SutSession::uncached(Box::new(MealySut::new(m.clone())), None);
        for w in words {
            let w: Vec<usize> = w.into_iter().map(|a| a % k).collect();
            let a = cached.execute(&w).unwrap();
            prop_assert_eq!(&a, &plain.execute(&w).unwrap());
            prop_assert_eq!(a.mapped, outputs_of(&m, &w));
        }
        prop_assert!(cached.executions() <= plain.executions());
    }

    #[test]
    fn mapper_is_total_and_exact(
        thresholds in prop::collection::vec((0usize..4, -5i32..5), 1..5),
        samples in prop::collection::vec(-6.0f64..6.0, 1..6),
    ) {
        let ops = ["<", "<=", ">", ">="];
        let text = thresholds
            .iter()
            .map(|(op, c)| format!("(x {} {})", ops[*op], c))
            .collect::<Vec<_>>()
            .join(" || ");
        let f = parse_formula(&format!("G ({text})")).unwrap();
        let m = OutputMapper::from_formula(&f).unwrap();
        let abs = m.abstract_formula(&f);
        // integer points sit exactly on thresholds
        let xs: Vec<f64> = samples.iter().copied().chain(thresholds.iter().map(|(_, c)| *c as f64)).collect();
        let vals: Vec<Valuation> = xs.iter().map(|&x| [("x".to_string(), x)].into_iter().collect()).collect();
        let mut mapped = Vec::new();
        for v in &vals {
            let cell = m.map(v).unwrap();
            prop_assert_eq!(cell.len(), 1);
            prop_assert!(m.propositions().is_superset(&cell));
            mapped.push(cell);
        }
        let raw = Trace::from_values(vals).unwrap();
        let abs_trace = Trace::from_props(mapped).unwrap();
        prop_assert_eq!(evaluate_all(&f, &raw).unwrap(), evaluate_all(&abs, &abs_trace).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A machine with at most one location more than a minimal hypothesis
    /// that differs from it is caught by a depth-1 suite.
    #[test]
    fn wmethod_is_complete_for_small_extensions(
        h in arb_machine(3, 2),
        seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        let hyp = h.minimize();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = hyp.num_locations() + 1;
        let sut_machine = random_machine(&mut rng, n, hyp.inputs().len(), &["p", "q"]);
        let differs = hyp.distinguishing_word(&sut_machine).is_some();
        let mut sut = SutSession::new(Box::new(MealySut::new(sut_machine.clone())), None);
        let found = wmethod_eqtest(&mut sut, &hyp, 1).unwrap();
        prop_assert_eq!(found.is_some(), differs);
        if let Some(w) = found {
            prop_assert_ne!(outputs_of(&hyp, &w), outputs_of(&sut_machine, &w));
        }
    }
}
