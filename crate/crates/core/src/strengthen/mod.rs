//! Strengthening of temporal formulas and the candidate pipeline built on
//! it: generation, ordering and selection of the strengthened formulas
//! tried by the checking loop.

mod candidates;
mod generate;
mod oracle;
mod order;
mod rules;

use thiserror::Error;

use crate::formula::FormulaError;

pub use candidates::{choose_fml, gen_candidates, CandidateSet};
pub use generate::{gen_int, gen_no_int};
pub use oracle::{semantically_stronger_oracle, TraceSpace, MAX_ORACLE_LEN, MAX_ORACLE_PROPS};
pub use order::syntactically_stronger;
pub use rules::{rule_instances, strengthen, weaken};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrengthenError {
    #[error("interval endpoint {endpoint} exceeds the horizon bound {horizon}")]
    EndpointExceedsHorizon { endpoint: u64, horizon: u64 },
    #[error("oracle domain too large: {props} propositions, length {len}")]
    DomainTooLarge { props: usize, len: usize },
    #[error("formula is not propositional: {0}")]
    NotPropositional(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}
