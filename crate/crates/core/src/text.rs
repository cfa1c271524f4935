//! Text form of polynomials: a recursive-descent parser and the canonical
//! printer.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('+' | '-') factor | power
//! power  := atom ('^' INT)?
//! atom   := INT ('/' INT)? | VAR | '(' expr ')'
//! VAR    := ('z' | 'w') INT            -- 1-based index
//! ```
//!
//! Implicit multiplication is rejected. The printer emits terms in
//! descending graded-lex order with explicit `*`, which the parser reads
//! back to the same polynomial.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{MultiPoly, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownVariable(String),
    NegativeExponent,
    ZeroDenominator,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::NegativeExponent => f.write_str("exponent must be a non-negative integer"),
            ParseErrorKind::ZeroDenominator => f.write_str("zero denominator"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(char, String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let ch = chars.next().unwrap();
            if ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            ch
        };
        if ch.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                let mut digits = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    digits.push(bump(&mut chars));
                }
                out.push(Spanned {
                    tok: Tok::Int(digits.parse().unwrap()),
                    line: l,
                    column: c,
                });
                continue;
            }
            'z' | 'w' => {
                let prefix = bump(&mut chars);
                let mut digits = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    digits.push(bump(&mut chars));
                }
                out.push(Spanned {
                    tok: Tok::Var(prefix, digits),
                    line: l,
                    column: c,
                });
                continue;
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: c,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                })
            }
        };
        bump(&mut chars);
        out.push(Spanned { tok, line: l, column: c });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    num_vars: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.pos += 1;
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Tok::Plus => {
                self.pos += 1;
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().clone() {
            Tok::Int(k) => {
                let k: u32 = k.try_into().map_err(|_| self.syntax("exponent too large"))?;
                self.pos += 1;
                Ok(base.pow(k))
            }
            Tok::Minus => Err(self.err(ParseErrorKind::NegativeExponent)),
            _ => Err(self.syntax("expected an integer exponent after `^`")),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek().clone() {
            Tok::Int(p) => {
                self.pos += 1;
                let mut value = Q::from_integer(p);
                if *self.peek() == Tok::Slash {
                    self.pos += 1;
                    let Tok::Int(q) = self.peek().clone() else {
                        return Err(self.syntax("expected an integer denominator after `/`"));
                    };
                    if q.is_zero() {
                        return Err(self.err(ParseErrorKind::ZeroDenominator));
                    }
                    self.pos += 1;
                    value /= Q::from_integer(q);
                }
                Ok(MultiPoly::constant(self.num_vars, value))
            }
            Tok::Var(prefix, digits) => {
                let name = format!("{prefix}{digits}");
                let index: usize = digits
                    .parse()
                    .map_err(|_| self.err(ParseErrorKind::UnknownVariable(name.clone())))?;
                if index == 0 || index > self.num_vars {
                    return Err(self.err(ParseErrorKind::UnknownVariable(name)));
                }
                self.pos += 1;
                Ok(MultiPoly::var(self.num_vars, index - 1))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::End => Err(self.syntax("unexpected end of input")),
            other => Err(self.syntax(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a polynomial in `num_vars` variables.
pub fn parse_poly(text: &str, num_vars: usize) -> Result<MultiPoly, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        num_vars,
    };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.syntax("trailing input (implicit multiplication is not allowed)"));
    }
    Ok(out)
}

/// Parses a rational literal `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Option<Q> {
    text.trim().parse::<Q>().ok()
}

/// Canonical text with variables named `{prefix}1 .. {prefix}n`.
pub fn format_poly(p: &MultiPoly, prefix: char) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let negative = c.is_negative();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = c.abs();
        let factors: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| {
                if e == 1 {
                    format!("{prefix}{}", k + 1)
                } else {
                    format!("{prefix}{}^{e}", k + 1)
                }
            })
            .collect();
        if factors.is_empty() {
            write!(out, "{abs}").unwrap();
        } else {
            if !abs.is_one() {
                write!(out, "{abs}*").unwrap();
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}
