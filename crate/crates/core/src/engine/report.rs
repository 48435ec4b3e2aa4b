//! Run results and their plain-text form.

use std::fmt::Write;
use std::time::Duration;

use super::{EqStrategy, Mode};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// A witness input word and the system's raw outputs on it.
    Falsified {
        witness: Vec<String>,
        outputs: Vec<String>,
    },
    DeemedSatisfied,
    Timeout,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Falsified { .. } => "FALSIFIED",
            Outcome::DeemedSatisfied => "DEEMED_SATISFIED",
            Outcome::Timeout => "TIMEOUT",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Counters {
    pub sut_executions: u64,
    pub sut_steps: u64,
    pub eq_rounds: u64,
    pub mc_calls_original: u64,
    pub mc_calls_strengthened: u64,
    pub mc_inconclusive: u64,
    pub hypotheses: u64,
    pub hypothesis_states: usize,
    pub refinements: u64,
    pub candidates_generated: usize,
    pub candidates_removed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbcReport {
    pub formula: String,
    pub mode: Mode,
    pub eq_strategy: EqStrategy,
    pub seed: u64,
    pub outcome: Outcome,
    pub counters: Counters,
    pub elapsed: Duration,
}

impl BbcReport {
    pub fn is_falsified(&self) -> bool {
        matches!(self.outcome, Outcome::Falsified { .. })
    }

    /// A summary line followed by `key: value` lines. Wall-clock time is
    /// only included on request, so that reports of equal runs are equal.
    pub fn to_text(&self, timing: bool) -> String {
        let c = &self.counters;
        let mut s = String::new();
        writeln!(
            s,
            "{} ({} mode, {} executions, {} equivalence rounds)",
            self.outcome.name(),
            self.mode,
            c.sut_executions,
            c.eq_rounds
        )
        .unwrap();
        let mut kv = |k: &str, v: String| writeln!(s, "{k}: {v}").unwrap();
        kv("verdict", self.outcome.name().into());
        kv("formula", self.formula.clone());
        kv("mode", self.mode.to_string());
        kv("eq_strategy", self.eq_strategy.to_string());
        kv("seed", self.seed.to_string());
        if let Outcome::Falsified { witness, outputs } = &self.outcome {
            kv("witness", witness.join(" "));
            kv("outputs", outputs.join(" "));
        }
        kv("sut_executions", c.sut_executions.to_string());
        kv("sut_steps", c.sut_steps.to_string());
        kv("eq_rounds", c.eq_rounds.to_string());
        kv("mc_calls_original", c.mc_calls_original.to_string());
        kv("mc_calls_strengthened", c.mc_calls_strengthened.to_string());
        kv("mc_inconclusive", c.mc_inconclusive.to_string());
        kv("hypotheses", c.hypotheses.to_string());
        kv("hypothesis_states", c.hypothesis_states.to_string());
        kv("refinements", c.refinements.to_string());
        kv("candidates_generated", c.candidates_generated.to_string());
        kv("candidates_removed", c.candidates_removed.to_string());
        if timing {
            kv("elapsed_ms", self.elapsed.as_millis().to_string());
        }
        s
    }
}

/// Reads the `key: value` lines of a report, skipping the summary line.
pub fn parse_report_fields(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(": "))
        .filter(|(k, _)| !k.contains(' '))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
