//! Abstraction of numeric samples into proposition letters.
//!
//! For every variable the thresholds of the formula split the real line
//! into the coarsest partition on which every comparison has a constant
//! truth value. A sample is mapped to the set holding one cell name per
//! variable.

use std::collections::{BTreeMap, BTreeSet};

use super::SutError;
use crate::formula::{CmpOp, Comparison, Formula, PropSet, Valuation};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound {
    Open(f64),
    Closed(f64),
}

impl Bound {
    fn value(self) -> f64 {
        match self {
            Bound::Open(c) | Bound::Closed(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Cell {
    lo: Option<Bound>,
    hi: Option<Bound>,
    name: String,
}

impl Cell {
    fn contains(&self, x: f64) -> bool {
        let above = match self.lo {
            None => true,
            Some(Bound::Open(c)) => x > c,
            Some(Bound::Closed(c)) => x >= c,
        };
        let below = match self.hi {
            None => true,
            Some(Bound::Open(c)) => x < c,
            Some(Bound::Closed(c)) => x <= c,
        };
        above && below
    }

    /// A point inside the cell.
    fn representative(&self) -> f64 {
        match (self.lo, self.hi) {
            (None, None) => 0.0,
            (Some(l), None) => l.value() + 1.0,
            (None, Some(h)) => h.value() - 1.0,
            (Some(l), Some(h)) if l.value() == h.value() => l.value(),
            (Some(l), Some(h)) => (l.value() + h.value()) / 2.0,
        }
    }
}

fn cell_name(var: &str, lo: Option<Bound>, hi: Option<Bound>) -> String {
    match (lo, hi) {
        (None, None) => var.to_string(),
        (Some(Bound::Closed(a)), Some(Bound::Closed(b))) if a == b => format!("{var}={a}"),
        (Some(l), None) => match l {
            Bound::Open(c) => format!("{var}>{c}"),
            Bound::Closed(c) => format!("{var}>={c}"),
        },
        (None, Some(h)) => match h {
            Bound::Open(c) => format!("{var}<{c}"),
            Bound::Closed(c) => format!("{var}<={c}"),
        },
        (Some(l), Some(h)) => {
            let left = match l {
                Bound::Open(c) => format!("{c}<"),
                Bound::Closed(c) => format!("{c}<="),
            };
            let right = match h {
                Bound::Open(c) => format!("<{c}"),
                Bound::Closed(c) => format!("<={c}"),
            };
            format!("{left}{var}{right}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct VarCells {
    var: String,
    cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputMapper {
    vars: Vec<VarCells>,
}

impl OutputMapper {
    /// The coarsest partition compatible with the comparisons of `f`.
    pub fn from_formula(f: &Formula) -> Result<Self, SutError> {
        let cmps = f.comparisons();
        if cmps.is_empty() {
            return Err(SutError::Mapper(format!(
                "formula `{f}` has no comparisons"
            )));
        }
        Ok(Self::from_comparisons(&cmps))
    }

    pub fn from_comparisons(cmps: &[Comparison]) -> Self {
        // per variable: threshold -> (closes a lower cell, opens an upper cell)
        let mut splits: BTreeMap<&str, BTreeMap<crate::formula::Threshold, (bool, bool)>> =
            BTreeMap::new();
        for c in cmps {
            let e = splits
                .entry(&c.var)
                .or_default()
                .entry(c.threshold)
                .or_default();
            match c.op {
                // `v > c`, `v <= c`: c belongs to the lower cell
                CmpOp::Gt | CmpOp::Le => e.0 = true,
                // `v < c`, `v >= c`: c belongs to the upper cell
                CmpOp::Lt | CmpOp::Ge => e.1 = true,
            }
        }
        let vars = splits
            .into_iter()
            .map(|(var, points)| {
                let mut cells = Vec::new();
                let mut lo: Option<Bound> = None;
                for (t, (lower_closed, upper_closed)) in points {
                    let c = t.0;
                    let hi = if lower_closed && !upper_closed {
                        Bound::Closed(c)
                    } else {
                        Bound::Open(c)
                    };
                    cells.push(Cell {
                        lo,
                        hi: Some(hi),
                        name: cell_name(var, lo, Some(hi)),
                    });
                    if lower_closed && upper_closed {
                        let point = Some(Bound::Closed(c));
                        cells.push(Cell {
                            lo: point,
                            hi: point,
                            name: cell_name(var, point, point),
                        });
                        lo = Some(Bound::Open(c));
                    } else {
                        lo = Some(if lower_closed {
                            Bound::Open(c)
                        } else {
                            Bound::Closed(c)
                        });
                    }
                }
                cells.push(Cell {
                    lo,
                    hi: None,
                    name: cell_name(var, lo, None),
                });
                VarCells {
                    var: var.to_string(),
                    cells,
                }
            })
            .collect();
        OutputMapper { vars }
    }

    pub fn variables(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.var.as_str()).collect()
    }

    /// Cell names of one variable in increasing order.
    pub fn cells(&self, var: &str) -> Vec<&str> {
        self.vars
            .iter()
            .find(|v| v.var == var)
            .map(|v| v.cells.iter().map(|c| c.name.as_str()).collect())
            .unwrap_or_default()
    }

    /// Every cell name of every variable.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.vars
            .iter()
            .flat_map(|v| v.cells.iter().map(|c| c.name.clone()))
            .collect()
    }

    /// Number of letters of the product partition.
    pub fn letter_count(&self) -> usize {
        self.vars.iter().map(|v| v.cells.len()).product()
    }

    pub fn map(&self, val: &Valuation) -> Result<PropSet, SutError> {
        self.vars
            .iter()
            .map(|v| {
                let x = *val.get(&v.var).ok_or_else(|| {
                    SutError::Mapper(format!("sample lacks variable `{}`", v.var))
                })?;
                v.cells
                    .iter()
                    .find(|c| c.contains(x))
                    .map(|c| c.name.clone())
                    .ok_or_else(|| {
                        SutError::Mapper(format!("value {x} of `{}` is not mappable", v.var))
                    })
            })
            .collect()
    }

    /// Rewrites every comparison into the disjunction of the cells where it
    /// holds, giving a formula over cell names.
    pub fn abstract_formula(&self, f: &Formula) -> Formula {
        f.map_atoms(&mut |a| match a {
            Formula::Cmp(c) => {
                let Some(v) = self.vars.iter().find(|v| v.var == c.var) else {
                    return Formula::False;
                };
                let holding: Vec<&Cell> = v
                    .cells
                    .iter()
                    .filter(|cell| c.holds(cell.representative()))
                    .collect();
                if holding.len() == v.cells.len() {
                    return Formula::True;
                }
                holding
                    .into_iter()
                    .map(|cell| Formula::atom(cell.name.clone()))
                    .reduce(Formula::or)
                    .unwrap_or(Formula::False)
            }
            other => other.clone(),
        })
    }
}
