use std::fmt;

use super::parse::is_plain_ident;
use super::{Formula, Interval};

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const BINARY_TEMPORAL: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => ATOM,
        // comparisons are parenthesized under unary operators for readability
        Formula::Cmp(_) => BINARY_TEMPORAL,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(..) | Formula::Globally(..) => {
            UNARY
        }
        Formula::Until(..) | Formula::Release(..) => BINARY_TEMPORAL,
        Formula::And(..) => AND,
        Formula::Or(..) => OR,
        Formula::Implies(..) => IMPLIES,
    }
}

struct Operand<'a>(&'a Formula, u8);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if level(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

struct OptInterval<'a>(&'a Interval);

impl fmt::Display for OptInterval<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_unbounded() {
            Ok(())
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(p) if is_plain_ident(p) => write!(f, "{p}"),
            Formula::Atom(p) => write!(f, "\"{p}\""),
            Formula::Cmp(c) => write!(f, "{c}"),
            Formula::Not(a) => write!(f, "!{}", Operand(a, UNARY)),
            Formula::Next(a) => write!(f, "X {}", Operand(a, UNARY)),
            Formula::Eventually(i, a) => write!(f, "F{} {}", OptInterval(i), Operand(a, UNARY)),
            Formula::Globally(i, a) => write!(f, "G{} {}", OptInterval(i), Operand(a, UNARY)),
            Formula::Until(i, a, b) => write!(
                f,
                "{} U{} {}",
                Operand(a, UNARY),
                OptInterval(i),
                Operand(b, UNARY)
            ),
            Formula::Release(i, a, b) => write!(
                f,
                "{} R{} {}",
                Operand(a, UNARY),
                OptInterval(i),
                Operand(b, UNARY)
            ),
            Formula::And(a, b) => {
                write!(f, "{} && {}", Operand(a, AND), Operand(b, BINARY_TEMPORAL))
            }
            Formula::Or(a, b) => write!(f, "{} || {}", Operand(a, OR), Operand(b, AND)),
            Formula::Implies(a, b) => write!(f, "{} -> {}", Operand(a, OR), Operand(b, IMPLIES)),
        }
    }
}
