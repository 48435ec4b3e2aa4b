//! Recursive-descent parser for the formula grammar.
//!
//! Precedence from tightest to loosest: `!`, the unary temporal operators
//! `X`/`F`/`G`, the binary `U`/`R`, `&&`, `||`, `->` (right associative).
//! Intervals are written `[a,b)`, `[a,b]` (sugar for `[a,b+1)`) or `[a,inf)`.

use super::{CmpOp, Comparison, Formula, FormulaError, Interval};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Num(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Not,
    And,
    Or,
    Arrow,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("\"{s}\""),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&&`".into(),
            Tok::Or => "`||`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = |s: &str| text[i..].starts_with(s);
        let tok = if two("&&") {
            i += 2;
            Tok::And
        } else if two("||") {
            i += 2;
            Tok::Or
        } else if two("->") {
            i += 2;
            Tok::Arrow
        } else if two("<=") {
            i += 2;
            Tok::Cmp(CmpOp::Le)
        } else if two(">=") {
            i += 2;
            Tok::Cmp(CmpOp::Ge)
        } else {
            match c {
                b'(' => {
                    i += 1;
                    Tok::LParen
                }
                b')' => {
                    i += 1;
                    Tok::RParen
                }
                b'[' => {
                    i += 1;
                    Tok::LBrack
                }
                b']' => {
                    i += 1;
                    Tok::RBrack
                }
                b',' => {
                    i += 1;
                    Tok::Comma
                }
                b'!' => {
                    i += 1;
                    Tok::Not
                }
                b'<' => {
                    i += 1;
                    Tok::Cmp(CmpOp::Lt)
                }
                b'>' => {
                    i += 1;
                    Tok::Cmp(CmpOp::Gt)
                }
                b'"' => {
                    let close = text[i + 1..]
                        .find('"')
                        .ok_or_else(|| syntax(i, "unterminated quoted atom"))?;
                    let name = text[i + 1..i + 1 + close].to_string();
                    i += close + 2;
                    Tok::Quoted(name)
                }
                b'-' | b'0'..=b'9' | b'.' => {
                    i += 1;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_digit()
                            || bytes[i] == b'.'
                            || ((bytes[i] == b'e' || bytes[i] == b'E')
                                && bytes.get(i + 1).is_some_and(|b| {
                                    b.is_ascii_digit() || *b == b'-' || *b == b'+'
                                }))
                            || ((bytes[i] == b'-' || bytes[i] == b'+')
                                && matches!(bytes[i - 1], b'e' | b'E')))
                    {
                        i += 1;
                    }
                    Tok::Num(text[start..i].to_string())
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    Tok::Ident(text[start..i].to_string())
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(syntax(i, format!("unexpected character `{ch}`")));
                }
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

const KEYWORDS: &[&str] = &["X", "F", "G", "U", "R", "true", "false", "inf"];

pub(crate) fn is_plain_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!(
                    "expected {}, found {}",
                    want.describe(),
                    self.peek().describe()
                ),
            ))
        }
    }

    fn implication(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.binary_temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        let until = self.is_kw("U");
        if until || self.is_kw("R") {
            self.bump();
            let iv = self.opt_interval()?;
            let rhs = self.binary_temporal()?;
            return Ok(if until {
                Formula::until(iv, lhs, rhs)
            } else {
                Formula::release(iv, lhs, rhs)
            });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw("X") {
            self.bump();
            return Ok(Formula::next(self.unary()?));
        }
        if self.is_kw("F") || self.is_kw("G") {
            let globally = self.is_kw("G");
            self.bump();
            let iv = self.opt_interval()?;
            let body = self.unary()?;
            return Ok(if globally {
                Formula::globally(iv, body)
            } else {
                Formula::eventually(iv, body)
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        let at = self.offset();
        match self.bump() {
            Tok::LParen => {
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Quoted(name) => Ok(Formula::Atom(name)),
            Tok::Ident(name) if name == "true" => Ok(Formula::True),
            Tok::Ident(name) if name == "false" => Ok(Formula::False),
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                Err(syntax(at, format!("unexpected keyword `{name}`")))
            }
            Tok::Ident(name) => {
                if let Tok::Cmp(op) = *self.peek() {
                    self.bump();
                    let num_at = self.offset();
                    match self.bump() {
                        Tok::Num(text) => {
                            let value: f64 = text
                                .parse()
                                .map_err(|_| syntax(num_at, format!("invalid number `{text}`")))?;
                            Ok(Formula::Cmp(Comparison::new(name, op, value)))
                        }
                        other => Err(syntax(
                            num_at,
                            format!("expected a number, found {}", other.describe()),
                        )),
                    }
                } else {
                    Ok(Formula::Atom(name))
                }
            }
            other => Err(syntax(
                at,
                format!("expected a formula, found {}", other.describe()),
            )),
        }
    }

    fn opt_interval(&mut self) -> Result<Interval, FormulaError> {
        if *self.peek() != Tok::LBrack {
            return Ok(Interval::unbounded());
        }
        self.bump();
        let lo_at = self.offset();
        let lo = match self.bump() {
            Tok::Num(t) => t
                .parse::<u64>()
                .map_err(|_| syntax(lo_at, format!("invalid interval bound `{t}`")))?,
            Tok::Ident(s) if s == "inf" => {
                return Err(syntax(lo_at, "infinity is not allowed as a lower bound"))
            }
            other => {
                return Err(syntax(
                    lo_at,
                    format!("expected an interval bound, found {}", other.describe()),
                ))
            }
        };
        self.expect(Tok::Comma)?;
        let hi_at = self.offset();
        let hi = match self.bump() {
            Tok::Num(t) => Some(
                t.parse::<u64>()
                    .map_err(|_| syntax(hi_at, format!("invalid interval bound `{t}`")))?,
            ),
            Tok::Ident(s) if s == "inf" => None,
            other => {
                return Err(syntax(
                    hi_at,
                    format!("expected an interval bound, found {}", other.describe()),
                ))
            }
        };
        let close_at = self.offset();
        let hi = match (self.bump(), hi) {
            (Tok::RParen, hi) => hi,
            (Tok::RBrack, Some(h)) => Some(h + 1),
            (Tok::RBrack, None) => None,
            (other, _) => {
                return Err(syntax(
                    close_at,
                    format!("expected `)` or `]`, found {}", other.describe()),
                ))
            }
        };
        Interval::new(lo, hi)
    }
}

/// Parses a formula in the textual grammar.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::Eof {
        return Err(syntax(
            p.offset(),
            format!("unexpected {}", p.peek().describe()),
        ));
    }
    Ok(f)
}
