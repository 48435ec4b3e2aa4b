use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Comparison, FormulaError};

/// A set of proposition names, one letter of a propositional trace.
pub type PropSet = BTreeSet<String>;

/// A valuation of signal variables, one sample of a discrete-time signal.
pub type Valuation = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum Letter {
    Props(PropSet),
    Values(Valuation),
}

impl Letter {
    pub fn props<I, S>(names: I) -> Letter
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Letter::Props(names.into_iter().map(Into::into).collect())
    }

    pub fn values<I, S>(pairs: I) -> Letter
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        Letter::Values(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn has_prop(&self, name: &str) -> Result<bool, FormulaError> {
        match self {
            Letter::Props(ps) => Ok(ps.contains(name)),
            Letter::Values(_) => Err(FormulaError::KindMismatch(format!(
                "proposition `{name}` evaluated on a signal sample"
            ))),
        }
    }

    pub fn value_of(&self, cmp: &Comparison) -> Result<f64, FormulaError> {
        match self {
            Letter::Values(vals) => vals.get(&cmp.var).copied().ok_or_else(|| {
                FormulaError::KindMismatch(format!("variable `{}` missing from sample", cmp.var))
            }),
            Letter::Props(_) => Err(FormulaError::KindMismatch(format!(
                "comparison `{cmp}` evaluated on a proposition set"
            ))),
        }
    }

    fn same_kind(&self, other: &Letter) -> bool {
        match (self, other) {
            (Letter::Props(_), Letter::Props(_)) => true,
            (Letter::Values(a), Letter::Values(b)) => a.keys().eq(b.keys()),
            _ => false,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Props(ps) => {
                write!(f, "{{")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "}}")
            }
            Letter::Values(vs) => {
                for (i, (k, v)) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                Ok(())
            }
        }
    }
}

/// A non-empty finite word of letters of one kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    letters: Vec<Letter>,
}

impl Trace {
    pub fn new(letters: Vec<Letter>) -> Result<Self, FormulaError> {
        let Some(first) = letters.first() else {
            return Err(FormulaError::InvalidTrace("trace is empty".into()));
        };
        if let Some(bad) = letters.iter().position(|l| !first.same_kind(l)) {
            return Err(FormulaError::InvalidTrace(format!(
                "letter {bad} differs in kind or variables from letter 0"
            )));
        }
        Ok(Trace { letters })
    }

    pub fn from_props(sets: impl IntoIterator<Item = PropSet>) -> Result<Self, FormulaError> {
        Trace::new(sets.into_iter().map(Letter::Props).collect())
    }

    pub fn from_values(vals: impl IntoIterator<Item = Valuation>) -> Result<Self, FormulaError> {
        Trace::new(vals.into_iter().map(Letter::Values).collect())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }
}
