//! The black-box checking loop, in a baseline form and in an enhanced
//! form that model checks strengthened formulas before falling back to
//! equivalence testing.

mod report;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{debug, info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{evaluate, AtomKind, Formula};
use crate::learn::{LearnError, ObservationTable};
use crate::machine::{model_check, MachineError, MealyMachine, Verdict};
use crate::search::{ga_eqtest, random_eqtest, wmethod_eqtest, SearchError, SearchParams};
use crate::strengthen::{choose_fml, gen_candidates, CandidateSet, StrengthenError};
use crate::sut::{Execution, SutError, SutSession};

pub use report::{parse_report_fields, BbcReport, Counters, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Baseline,
    Enhanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqStrategy {
    Random,
    Ga,
    WMethod,
}

macro_rules! names {
    ($t:ty { $($v:ident => $s:literal),* }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$v => $s),* })
            }
        }

        impl FromStr for $t {
            type Err = EngineError;

            fn from_str(s: &str) -> Result<Self, EngineError> {
                match s {
                    $($s => Ok(Self::$v),)*
                    _ => Err(EngineError::Config(format!("unknown {} `{s}`", stringify!($t)))),
                }
            }
        }
    };
}

names!(Mode { Baseline => "baseline", Enhanced => "enhanced" });
names!(EqStrategy { Random => "random", Ga => "ga", WMethod => "wmethod" });

#[derive(Debug, Clone, PartialEq)]
pub struct BbcConfig {
    pub mode: Mode,
    /// Bound used when strengthening intervals.
    pub horizon: u64,
    /// Longest word explored by the model checker.
    pub mc_horizon: usize,
    pub mc_cap: usize,
    pub timeout: Option<Duration>,
    /// Stop once the system has run this many words.
    pub max_executions: Option<u64>,
    pub eq_strategy: EqStrategy,
    /// Search parameters; `search.seed` seeds every random choice.
    pub search: SearchParams,
}

impl Default for BbcConfig {
    fn default() -> Self {
        BbcConfig {
            mode: Mode::Enhanced,
            horizon: 30,
            mc_horizon: 30,
            mc_cap: crate::machine::DEFAULT_CAP,
            timeout: None,
            max_executions: Some(100_000),
            eq_strategy: EqStrategy::Random,
            search: SearchParams::default(),
        }
    }
}

impl BbcConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.horizon == 0 || self.mc_horizon == 0 || self.mc_cap == 0 {
            return Err(EngineError::Config(
                "horizons and state cap must be positive".into(),
            ));
        }
        if self.timeout.is_none() && self.max_executions.is_none() {
            return Err(EngineError::Config(
                "set a timeout or an execution budget".into(),
            ));
        }
        self.search
            .validate()
            .map_err(|e| EngineError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Strengthen(#[from] StrengthenError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Sut(#[from] SutError),
    /// The system failed mid-run; `partial` holds the counters so far.
    #[error("system under test failed: {error}")]
    Aborted {
        error: SutError,
        partial: Box<BbcReport>,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Result of running a witness on the system.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub violates: bool,
    pub execution: Execution,
}

/// Runs `w` once and evaluates `f` at position 0 of the output trace:
/// on the raw samples when `f` compares signals, on the mapped letters
/// otherwise.
pub fn replay_witness(
    sut: &mut SutSession,
    w: &[usize],
    f: &Formula,
) -> Result<Replay, EngineError> {
    if w.is_empty() {
        return Err(EngineError::Internal("cannot replay the empty word".into()));
    }
    let execution = sut.execute(w)?;
    Ok(Replay {
        violates: violates(f, &execution)?,
        execution,
    })
}

fn violates(f: &Formula, execution: &Execution) -> Result<bool, EngineError> {
    let trace = match f.atom_kind() {
        AtomKind::Signal | AtomKind::Mixed => execution.raw_trace(),
        _ => execution.mapped_trace(),
    }
    .ok_or_else(|| EngineError::Internal("empty output trace".into()))?;
    let holds = evaluate(f, &trace, 0).map_err(|e| EngineError::Internal(e.to_string()))?;
    Ok(!holds)
}

enum Step {
    Continue,
    /// Equivalence testing found no difference.
    Satisfied,
    /// A word whose execution violates the formula.
    Falsified(Vec<usize>, Execution),
}

/// Why a stage ended the loop early.
enum Stop {
    Timeout,
    Sut(SutError),
    Fatal(EngineError),
}

impl From<LearnError> for Stop {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::Teacher(s) => Stop::Sut(s),
            other => Stop::Fatal(EngineError::Internal(other.to_string())),
        }
    }
}

impl From<SearchError> for Stop {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Sut(s) => Stop::Sut(s),
            other => Stop::Fatal(EngineError::Internal(other.to_string())),
        }
    }
}

impl From<MachineError> for Stop {
    fn from(e: MachineError) -> Self {
        Stop::Fatal(e.into())
    }
}

impl From<EngineError> for Stop {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Sut(error) | EngineError::Aborted { error, .. } => Stop::Sut(error),
            other => Stop::Fatal(other),
        }
    }
}

struct Run<'a> {
    sut: &'a mut SutSession,
    f: &'a Formula,
    /// `f` over the letters the model checker sees.
    f_abs: Formula,
    cfg: &'a BbcConfig,
    table: ObservationTable,
    hyp: MealyMachine,
    candidates: CandidateSet,
    counters: Counters,
    rng: ChaCha8Rng,
    start: Instant,
    ga_usable: bool,
}

impl Run<'_> {
    fn expired(&self) -> bool {
        self.cfg.timeout.is_some_and(|t| self.start.elapsed() >= t)
            || self
                .cfg
                .max_executions
                .is_some_and(|m| self.sut.executions() >= m)
    }

    fn check_time(&self) -> Result<(), Stop> {
        if self.expired() {
            Err(Stop::Timeout)
        } else {
            Ok(())
        }
    }

    fn abstracted(&self, f: &Formula) -> Formula {
        match self.sut.mapper() {
            Some(m) if matches!(f.atom_kind(), AtomKind::Signal | AtomKind::Mixed) => {
                m.abstract_formula(f)
            }
            _ => f.clone(),
        }
    }

    fn model_check(&mut self, f: &Formula) -> Result<Option<Vec<usize>>, Stop> {
        match model_check(&self.hyp, f, self.cfg.mc_horizon, self.cfg.mc_cap)? {
            Verdict::Holds => Ok(None),
            Verdict::Violated { witness, .. } => Ok(Some(witness)),
            Verdict::Inconclusive(why) => {
                warn!("model checking `{f}` was inconclusive ({why}); treating it as satisfied");
                self.counters.mc_inconclusive += 1;
                Ok(None)
            }
        }
    }

    fn refine(&mut self, w: &[usize]) -> Result<(), Stop> {
        debug!("refining with `{}`", self.hyp.word_names(w).join(" "));
        self.table.refine_with_counterexample(w, self.sut)?;
        self.hyp = self.table.learn_hypothesis(self.sut)?;
        self.counters.refinements += 1;
        self.counters.hypotheses += 1;
        self.counters.hypothesis_states = self.hyp.num_locations();
        Ok(())
    }

    fn equivalence_test(&mut self) -> Result<Option<Vec<usize>>, Stop> {
        self.counters.eq_rounds += 1;
        let p = &self.cfg.search;
        let found = match self.cfg.eq_strategy {
            EqStrategy::WMethod => wmethod_eqtest(self.sut, &self.hyp, p.wmethod_depth)?,
            EqStrategy::Ga if self.ga_usable => {
                match ga_eqtest(self.sut, &self.hyp, self.f, p, &mut self.rng) {
                    Err(SearchError::NotNumeric) => {
                        warn!("the system has no numeric outputs; using random testing instead");
                        self.ga_usable = false;
                        random_eqtest(self.sut, &self.hyp, p, &mut self.rng)?
                    }
                    other => other?,
                }
            }
            EqStrategy::Ga | EqStrategy::Random => {
                random_eqtest(self.sut, &self.hyp, p, &mut self.rng)?
            }
        };
        Ok(found)
    }

    /// One pass of the main loop.
    fn iterate(&mut self) -> Result<Step, Stop> {
        self.check_time()?;
        self.counters.mc_calls_original += 1;
        let f_abs = self.f_abs.clone();
        let sigma = match self.model_check(&f_abs)? {
            Some(w) => {
                let replay = replay_witness(self.sut, &w, self.f)?;
                if replay.violates {
                    return Ok(Step::Falsified(w, replay.execution));
                }
                w
            }
            None => {
                let mut found = None;
                if self.cfg.mode == Mode::Enhanced {
                    for psi in choose_fml(&self.candidates) {
                        self.check_time()?;
                        self.counters.mc_calls_strengthened += 1;
                        let psi_abs = self.abstracted(&psi);
                        let Some(w) = self.model_check(&psi_abs)? else {
                            continue;
                        };
                        if replay_witness(self.sut, &w, &psi)?.violates {
                            debug!("the system violates `{psi}`; dropping it");
                            self.candidates.remove(&psi);
                            self.counters.candidates_removed += 1;
                        } else {
                            found = Some(w);
                            break;
                        }
                    }
                }
                match found {
                    Some(w) => w,
                    None => {
                        self.check_time()?;
                        match self.equivalence_test()? {
                            Some(w) => w,
                            None => return Ok(Step::Satisfied),
                        }
                    }
                }
            }
        };
        self.check_time()?;
        self.refine(&sigma)?;
        Ok(Step::Continue)
    }
}

/// Checks the system against `f`. The session must carry an output
/// mapper when `f` compares numeric signals.
pub fn run_bbc(
    sut: &mut SutSession,
    f: &Formula,
    cfg: &BbcConfig,
) -> Result<BbcReport, EngineError> {
    cfg.validate()?;
    let start = Instant::now();
    let f_abs = match (f.atom_kind(), sut.mapper()) {
        (AtomKind::Signal | AtomKind::Mixed, Some(m)) => m.abstract_formula(f),
        (AtomKind::Signal | AtomKind::Mixed, None) => {
            return Err(EngineError::Config(format!(
                "`{f}` compares signals but no output mapper is set"
            )))
        }
        _ => f.clone(),
    };
    let candidates = match cfg.mode {
        Mode::Enhanced => gen_candidates(f, cfg.horizon)?,
        Mode::Baseline => CandidateSet::default(),
    };
    info!(
        "checking `{f}` in {} mode with {} candidates",
        cfg.mode,
        candidates.len()
    );
    let mut counters = Counters {
        candidates_generated: candidates.len(),
        ..Counters::default()
    };
    let mut table = ObservationTable::new(sut.inputs().to_vec(), sut.propositions());
    let report = |sut: &SutSession, counters: &Counters, outcome: Outcome| {
        let mut counters = counters.clone();
        counters.sut_executions = sut.executions();
        counters.sut_steps = sut.steps();
        BbcReport {
            formula: f.to_string(),
            mode: cfg.mode,
            eq_strategy: cfg.eq_strategy,
            seed: cfg.search.seed,
            outcome,
            counters,
            elapsed: start.elapsed(),
        }
    };
    let hyp = match table.learn_hypothesis(sut) {
        Ok(h) => h,
        Err(LearnError::Teacher(error)) => {
            let partial = Box::new(report(sut, &counters, Outcome::Timeout));
            return Err(EngineError::Aborted { error, partial });
        }
        Err(e) => return Err(EngineError::Internal(e.to_string())),
    };
    counters.hypotheses = 1;
    counters.hypothesis_states = hyp.num_locations();
    let mut run = Run {
        sut,
        f,
        f_abs,
        cfg,
        table,
        hyp,
        candidates,
        counters,
        rng: ChaCha8Rng::seed_from_u64(cfg.search.seed),
        start,
        ga_usable: true,
    };
    loop {
        match run.iterate() {
            Ok(Step::Continue) => continue,
            Ok(Step::Satisfied) => {
                return Ok(report(run.sut, &run.counters, Outcome::DeemedSatisfied))
            }
            Ok(Step::Falsified(w, exec)) => {
                assert_eq!(
                    violates(f, &exec),
                    Ok(true),
                    "a reported witness must violate the formula"
                );
                let trace = exec.raw_trace().expect("witnesses are non-empty");
                let outcome = Outcome::Falsified {
                    witness: w.iter().map(|&a| run.sut.inputs()[a].clone()).collect(),
                    outputs: trace.letters().iter().map(|l| l.to_string()).collect(),
                };
                return Ok(report(run.sut, &run.counters, outcome));
            }
            Err(Stop::Timeout) => return Ok(report(run.sut, &run.counters, Outcome::Timeout)),
            Err(Stop::Sut(error)) => {
                let partial = Box::new(report(run.sut, &run.counters, Outcome::Timeout));
                return Err(EngineError::Aborted { error, partial });
            }
            Err(Stop::Fatal(e)) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::machine::load_machine;
    use crate::sut::MealySut;

    fn session(text: &str) -> SutSession {
        SutSession::new(Box::new(MealySut::new(load_machine(text).unwrap())), None)
    }

    const CONST_P: &str =
        "inputs: a b\npropositions: p\ninitial: s\ns --a/{p}--> s\ns --b/{p}--> s\n";
    const EMPTY: &str = "inputs: a b\npropositions: p\ninitial: s\ns --a/{}--> s\ns --b/{}--> s\n";
    /// Drops `p` only after three `a`s in a row.
    const LATE_BUG: &str = "\
inputs: a b
propositions: p
initial: s0
s0 --a/{p}--> s1
s0 --b/{p}--> s0
s1 --a/{p}--> s2
s1 --b/{p}--> s0
s2 --a/{p}--> s3
s2 --b/{p}--> s0
s3 --a/{}--> s3
s3 --b/{p}--> s0
";

    fn cfg(mode: Mode, eq: EqStrategy) -> BbcConfig {
        BbcConfig {
            mode,
            eq_strategy: eq,
            mc_horizon: 8,
            horizon: 8,
            ..BbcConfig::default()
        }
    }

    #[test]
    fn replay_examples() {
        let f = parse_formula("G p").unwrap();
        let r = replay_witness(&mut session(CONST_P), &[0, 1, 0], &f).unwrap();
        assert!(!r.violates);
        assert_eq!(r.execution.mapped.len(), 3);
        let r = replay_witness(&mut session(EMPTY), &[0], &f).unwrap();
        assert!(r.violates);
        assert_eq!(r.execution.mapped, vec![Default::default()]);
    }

    #[test]
    fn immediate_violation() {
        let f = parse_formula("G p").unwrap();
        for mode in [Mode::Baseline, Mode::Enhanced] {
            let mut sut = session(EMPTY);
            let r = run_bbc(&mut sut, &f, &cfg(mode, EqStrategy::Random)).unwrap();
            match &r.outcome {
                Outcome::Falsified { witness, outputs } => {
                    assert_eq!(witness.len(), 1);
                    assert_eq!(outputs, &vec!["{}".to_string()]);
                }
                o => panic!("{o:?}"),
            }
            assert_eq!(r.counters.eq_rounds, 0);
            assert_eq!(r.counters.sut_executions, sut.executions());
        }
    }

    #[test]
    fn satisfied_with_wmethod() {
        let f = parse_formula("G p").unwrap();
        let m = load_machine(CONST_P).unwrap();
        assert_eq!(model_check(&m, &f, 8, 1000).unwrap(), Verdict::Holds);
        for mode in [Mode::Baseline, Mode::Enhanced] {
            let r = run_bbc(&mut session(CONST_P), &f, &cfg(mode, EqStrategy::WMethod)).unwrap();
            assert_eq!(r.outcome, Outcome::DeemedSatisfied);
        }
    }

    #[test]
    fn late_bug_is_found_by_both_modes() {
        let f = parse_formula("G p").unwrap();
        for mode in [Mode::Baseline, Mode::Enhanced] {
            for eq in [EqStrategy::Random, EqStrategy::WMethod, EqStrategy::Ga] {
                let mut sut = session(LATE_BUG);
                let r = run_bbc(&mut sut, &f, &cfg(mode, eq)).unwrap();
                match &r.outcome {
                    Outcome::Falsified { witness, .. } => {
                        let w: Vec<usize> = witness
                            .iter()
                            .map(|a| if a == "a" { 0 } else { 1 })
                            .collect();
                        assert!(replay_witness(&mut sut, &w, &f).unwrap().violates);
                    }
                    o => panic!("{mode} {eq}: {o:?}"),
                }
            }
        }
    }

    #[test]
    fn execution_budget_gives_timeout() {
        let f = parse_formula("G p").unwrap();
        let c = BbcConfig {
            max_executions: Some(1),
            ..cfg(Mode::Baseline, EqStrategy::Random)
        };
        let r = run_bbc(&mut session(CONST_P), &f, &c).unwrap();
        assert_eq!(r.outcome, Outcome::Timeout);
    }

    #[test]
    fn config_errors() {
        let f = parse_formula("G (v < 3)").unwrap();
        assert!(matches!(
            run_bbc(&mut session(CONST_P), &f, &BbcConfig::default()),
            Err(EngineError::Config(_))
        ));
        let c = BbcConfig {
            timeout: None,
            max_executions: None,
            ..BbcConfig::default()
        };
        assert!(c.validate().is_err());
        assert_eq!(
            "wmethod".parse::<EqStrategy>().unwrap(),
            EqStrategy::WMethod
        );
        assert!("fast".parse::<Mode>().is_err());
    }
}
