//! Finite-trace Boolean semantics and quantitative robustness.
//!
//! Quantifier ranges are clipped to the trace: `X` at the last position is
//! false, and an `U` witness must lie inside the trace. The left operand of
//! `U` is required at every position from `k` up to and including the
//! witness position.

use super::{Formula, FormulaError, Interval, Trace};

/// Positions `l` of the window `k + iv` that lie inside a trace of length `n`.
fn window(k: usize, iv: &Interval, n: usize) -> std::ops::Range<usize> {
    let lo = k.saturating_add(iv.lo() as usize).min(n);
    let hi = match iv.hi() {
        Some(h) => k.saturating_add(h as usize).min(n),
        None => n,
    };
    lo..hi.max(lo)
}

/// Satisfaction of `f` at every position of `t`.
pub fn evaluate_all(f: &Formula, t: &Trace) -> Result<Vec<bool>, FormulaError> {
    let n = t.len();
    Ok(match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => t
            .letters()
            .iter()
            .map(|l| l.has_prop(p))
            .collect::<Result<_, _>>()?,
        Formula::Cmp(c) => t
            .letters()
            .iter()
            .map(|l| l.value_of(c).map(|v| c.holds(v)))
            .collect::<Result<_, _>>()?,
        Formula::Not(a) => evaluate_all(a, t)?.into_iter().map(|x| !x).collect(),
        Formula::And(a, b) => zip(evaluate_all(a, t)?, evaluate_all(b, t)?, |x, y| x && y),
        Formula::Or(a, b) => zip(evaluate_all(a, t)?, evaluate_all(b, t)?, |x, y| x || y),
        Formula::Implies(a, b) => zip(evaluate_all(a, t)?, evaluate_all(b, t)?, |x, y| !x || y),
        Formula::Next(a) => {
            let a = evaluate_all(a, t)?;
            (0..n).map(|k| k + 1 < n && a[k + 1]).collect()
        }
        Formula::Until(iv, a, b) => until(iv, &evaluate_all(a, t)?, &evaluate_all(b, t)?),
        Formula::Release(iv, a, b) => {
            let na: Vec<bool> = evaluate_all(a, t)?.into_iter().map(|x| !x).collect();
            let nb: Vec<bool> = evaluate_all(b, t)?.into_iter().map(|x| !x).collect();
            until(iv, &na, &nb).into_iter().map(|x| !x).collect()
        }
        Formula::Eventually(iv, a) => {
            let a = evaluate_all(a, t)?;
            (0..n).map(|k| window(k, iv, n).any(|l| a[l])).collect()
        }
        Formula::Globally(iv, a) => {
            let a = evaluate_all(a, t)?;
            (0..n).map(|k| window(k, iv, n).all(|l| a[l])).collect()
        }
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn until(iv: &Interval, a: &[bool], b: &[bool]) -> Vec<bool> {
    let n = a.len();
    (0..n)
        .map(|k| {
            let w = window(k, iv, n);
            // the left operand must hold on [k, l], l included
            (k..w.end)
                .take_while(|&m| a[m])
                .any(|l| l >= w.start && b[l])
        })
        .collect()
}

/// Satisfaction of `f` by `t` at position `k`.
pub fn evaluate(f: &Formula, t: &Trace, k: usize) -> Result<bool, FormulaError> {
    if k >= t.len() {
        return Err(FormulaError::PositionOutOfRange {
            position: k,
            len: t.len(),
        });
    }
    Ok(evaluate_all(f, t)?[k])
}

fn robustness_all(f: &Formula, t: &Trace) -> Result<Vec<f64>, FormulaError> {
    let n = t.len();
    let pair =
        |a: &Formula, b: &Formula, op: fn(f64, f64) -> f64| -> Result<Vec<f64>, FormulaError> {
            let (a, b) = (robustness_all(a, t)?, robustness_all(b, t)?);
            Ok(a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect())
        };
    Ok(match f {
        Formula::True => vec![f64::INFINITY; n],
        Formula::False => vec![f64::NEG_INFINITY; n],
        Formula::Atom(p) => {
            return Err(FormulaError::KindMismatch(format!(
                "robustness of proposition `{p}` is undefined"
            )))
        }
        Formula::Cmp(c) => t
            .letters()
            .iter()
            .map(|l| l.value_of(c).map(|v| c.robustness(v)))
            .collect::<Result<_, _>>()?,
        Formula::Not(a) => robustness_all(a, t)?.into_iter().map(|x| -x).collect(),
        Formula::And(a, b) => pair(a, b, f64::min)?,
        Formula::Or(a, b) => pair(a, b, f64::max)?,
        Formula::Implies(a, b) => pair(a, b, |x, y| (-x).max(y))?,
        Formula::Next(a) => {
            let a = robustness_all(a, t)?;
            (0..n)
                .map(|k| {
                    if k + 1 < n {
                        a[k + 1]
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect()
        }
        Formula::Until(iv, a, b) => rob_until(iv, &robustness_all(a, t)?, &robustness_all(b, t)?),
        Formula::Release(iv, a, b) => {
            let na: Vec<f64> = robustness_all(a, t)?.into_iter().map(|x| -x).collect();
            let nb: Vec<f64> = robustness_all(b, t)?.into_iter().map(|x| -x).collect();
            rob_until(iv, &na, &nb).into_iter().map(|x| -x).collect()
        }
        Formula::Eventually(iv, a) => {
            let a = robustness_all(a, t)?;
            (0..n)
                .map(|k| {
                    window(k, iv, n)
                        .map(|l| a[l])
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect()
        }
        Formula::Globally(iv, a) => {
            let a = robustness_all(a, t)?;
            (0..n)
                .map(|k| window(k, iv, n).map(|l| a[l]).fold(f64::INFINITY, f64::min))
                .collect()
        }
    })
}

fn rob_until(iv: &Interval, a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|k| {
            let w = window(k, iv, n);
            let mut left = f64::INFINITY;
            let mut best = f64::NEG_INFINITY;
            for l in k..w.end {
                left = left.min(a[l]);
                if l >= w.start {
                    best = best.max(b[l].min(left));
                }
            }
            best
        })
        .collect()
}

/// Quantitative satisfaction degree of a signal formula at position `k`;
/// positive means satisfied, negative means violated.
pub fn robustness(f: &Formula, t: &Trace, k: usize) -> Result<f64, FormulaError> {
    if k >= t.len() {
        return Err(FormulaError::PositionOutOfRange {
            position: k,
            len: t.len(),
        });
    }
    Ok(robustness_all(f, t)?[k])
}
