//! Systems under test: a reset/step interface, sessions that cache
//! executed words and count real executions, and the built-in backends.

mod mapper;
mod mealy;
mod process;
mod transmission;

use std::collections::{BTreeSet, HashMap};
use std::time::Duration;

use thiserror::Error;

use crate::formula::{Letter, PropSet, Trace, Valuation};

pub use mapper::OutputMapper;
pub use mealy::MealySut;
pub use process::ProcessSut;
pub use transmission::{TransmissionParams, TransmissionSim, PEDALS, TRANSMISSION_INPUTS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SutError {
    #[error("unknown input letter {0}")]
    UnknownInput(usize),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("system under test exited: {0}")]
    Exited(String),
    #[error("no reply within {0:?}")]
    Timeout(Duration),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("output mapping failed: {0}")]
    Mapper(String),
    #[error("numeric outputs need an output mapper")]
    NeedsMapper,
}

/// One output letter as produced by the system.
#[derive(Debug, Clone, PartialEq)]
pub enum RawOutput {
    Props(PropSet),
    Values(Valuation),
}

impl RawOutput {
    pub fn to_letter(&self) -> Letter {
        match self {
            RawOutput::Props(p) => Letter::Props(p.clone()),
            RawOutput::Values(v) => Letter::Values(v.clone()),
        }
    }
}

/// A black-box reactive system.
pub trait Sut: Send {
    fn inputs(&self) -> &[String];

    /// Propositions the system may emit; empty for numeric systems.
    fn propositions(&self) -> BTreeSet<String>;

    fn reset(&mut self) -> Result<(), SutError>;

    fn step(&mut self, input: usize) -> Result<RawOutput, SutError>;
}

/// Creates independent sessions of the same system, for parallel search.
pub trait SutFactory: Send + Sync {
    fn create(&self) -> Result<Box<dyn Sut>, SutError>;
}

impl<F> SutFactory for F
where
    F: Fn() -> Result<Box<dyn Sut>, SutError> + Send + Sync,
{
    fn create(&self) -> Result<Box<dyn Sut>, SutError> {
        self()
    }
}

#[derive(Debug, Default)]
struct TrieNode {
    children: HashMap<usize, usize>,
    output: Option<RawOutput>,
}

/// Prefix tree of executed words; every prefix of an executed word is
/// answered from it.
#[derive(Debug)]
struct Trie {
    nodes: Vec<TrieNode>,
}

impl Trie {
    fn new() -> Self {
        Trie {
            nodes: vec![TrieNode::default()],
        }
    }

    fn lookup(&self, word: &[usize]) -> Option<Vec<RawOutput>> {
        let mut cur = 0;
        let mut out = Vec::with_capacity(word.len());
        for a in word {
            cur = *self.nodes[cur].children.get(a)?;
            out.push(
                self.nodes[cur]
                    .output
                    .clone()
                    .expect("inner nodes carry outputs"),
            );
        }
        Some(out)
    }

    fn insert(&mut self, word: &[usize], outputs: &[RawOutput]) {
        let mut cur = 0;
        for (a, o) in word.iter().zip(outputs) {
            cur = match self.nodes[cur].children.get(a) {
                Some(&n) => n,
                None => {
                    self.nodes.push(TrieNode {
                        children: HashMap::new(),
                        output: Some(o.clone()),
                    });
                    let n = self.nodes.len() - 1;
                    self.nodes[cur].children.insert(*a, n);
                    n
                }
            };
        }
    }
}

/// Outputs of one input word, raw and as proposition letters.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub raw: Vec<RawOutput>,
    pub mapped: Vec<PropSet>,
}

impl Execution {
    pub fn raw_trace(&self) -> Option<Trace> {
        Trace::new(self.raw.iter().map(RawOutput::to_letter).collect()).ok()
    }

    pub fn mapped_trace(&self) -> Option<Trace> {
        Trace::from_props(self.mapped.iter().cloned()).ok()
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.raw.first(), Some(RawOutput::Values(_)))
    }
}

/// Exclusive access to a system with a query cache, an execution counter
/// and an optional output mapper.
pub struct SutSession {
    sut: Box<dyn Sut>,
    mapper: Option<OutputMapper>,
    cache: Option<Trie>,
    executions: u64,
    steps: u64,
}

impl SutSession {
    pub fn new(sut: Box<dyn Sut>, mapper: Option<OutputMapper>) -> Self {
        SutSession {
            sut,
            mapper,
            cache: Some(Trie::new()),
            executions: 0,
            steps: 0,
        }
    }

    /// A session that re-executes every query, for cache soundness checks.
    pub fn uncached(sut: Box<dyn Sut>, mapper: Option<OutputMapper>) -> Self {
        SutSession {
            cache: None,
            ..SutSession::new(sut, mapper)
        }
    }

    pub fn inputs(&self) -> &[String] {
        self.sut.inputs()
    }

    pub fn mapper(&self) -> Option<&OutputMapper> {
        self.mapper.as_ref()
    }

    /// Proposition universe of the mapped outputs.
    pub fn propositions(&self) -> BTreeSet<String> {
        match &self.mapper {
            Some(m) => m.propositions(),
            None => self.sut.propositions(),
        }
    }

    /// Number of words actually run on the system (cache hits excluded).
    pub fn executions(&self) -> u64 {
        self.executions
    }

    /// Number of single steps actually run on the system.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn map(&self, raw: &RawOutput) -> Result<PropSet, SutError> {
        match (raw, &self.mapper) {
            (RawOutput::Props(p), _) => Ok(p.clone()),
            (RawOutput::Values(v), Some(m)) => m.map(v),
            (RawOutput::Values(_), None) => Err(SutError::NeedsMapper),
        }
    }

    pub fn execute(&mut self, word: &[usize]) -> Result<Execution, SutError> {
        if let Some(&bad) = word.iter().find(|&&a| a >= self.sut.inputs().len()) {
            return Err(SutError::UnknownInput(bad));
        }
        let cached = self.cache.as_ref().and_then(|c| c.lookup(word));
        let raw = match cached {
            Some(raw) => raw,
            None => {
                self.sut.reset()?;
                let mut raw = Vec::with_capacity(word.len());
                for &a in word {
                    raw.push(self.sut.step(a)?);
                }
                self.executions += 1;
                self.steps += word.len() as u64;
                if let Some(c) = self.cache.as_mut() {
                    c.insert(word, &raw);
                }
                raw
            }
        };
        let mapped = raw.iter().map(|r| self.map(r)).collect::<Result<_, _>>()?;
        Ok(Execution { raw, mapped })
    }

    /// Mapped output word of `word`.
    pub fn query(&mut self, word: &[usize]) -> Result<Vec<PropSet>, SutError> {
        Ok(self.execute(word)?.mapped)
    }
}
