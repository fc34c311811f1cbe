//! Text format for polynomial systems.
//!
//! Polynomials are separated by `;` or newlines; `#` starts a comment that
//! runs to the end of the line. Variables are `x1 … xn`, with `x`, `y`, `z`
//! accepted as aliases when `n ≤ 3`. Coefficients are integer or decimal
//! literals; operators are `+ - * ^` and parentheses. Exponents must be
//! non-negative integer literals.

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Sep,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            '\n' | ';' => {
                if depth == 0 {
                    out.push((Tok::Sep, i));
                } else if c == ';' {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: "separator inside parentheses".into(),
                    });
                }
            }
            c if c.is_whitespace() => {}
            '+' => out.push((Tok::Plus, i)),
            '-' => out.push((Tok::Minus, i)),
            '*' => out.push((Tok::Star, i)),
            '^' => out.push((Tok::Caret, i)),
            '(' => {
                depth += 1;
                out.push((Tok::LParen, i));
            }
            ')' => {
                depth = depth.saturating_sub(1);
                out.push((Tok::RParen, i));
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                out.push((Tok::Num(text[start..i].to_string()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    nvars: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn expr<T: Real>(&mut self) -> Result<Polynomial<T>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<T: Real>(&mut self) -> Result<Polynomial<T>> {
        let mut acc = self.signed()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.signed()?;
        }
        Ok(acc)
    }

    fn signed<T: Real>(&mut self) -> Result<Polynomial<T>> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.signed::<T>()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.signed()
            }
            _ => self.power(),
        }
    }

    fn power<T: Real>(&mut self) -> Result<Polynomial<T>> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let at = self.offset();
            match self.peek() {
                Some(Tok::Num(s)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                    let e: u32 = s.parse().map_err(|_| Error::BadExponent { pos: at })?;
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => Err(Error::BadExponent { pos: at }),
            }
        } else {
            Ok(base)
        }
    }

    fn primary<T: Real>(&mut self) -> Result<Polynomial<T>> {
        let at = self.offset();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    pos: at,
                    msg: format!("malformed number `{s}`"),
                })?;
                Ok(Polynomial::constant(self.nvars, T::of(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let idx = resolve_variable(&name, self.nvars).ok_or(Error::UnknownVariable {
                    name: name.clone(),
                    pos: at,
                })?;
                Ok(Polynomial::var(self.nvars, idx))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Syntax {
                        pos: self.offset(),
                        msg: "expected `)`".into(),
                    }),
                }
            }
            Some(t) => Err(Error::Syntax {
                pos: at,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(Error::Syntax {
                pos: at,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

fn resolve_variable(name: &str, nvars: usize) -> Option<usize> {
    if nvars <= 3 {
        if let Some(i) = ["x", "y", "z"].iter().position(|&a| a == name) {
            return (i < nvars).then_some(i);
        }
    }
    let idx: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=nvars).contains(&idx).then(|| idx - 1)
}

/// Parses a system of polynomials in `nvars` variables.
///
/// Empty entries (blank lines, comment-only lines, trailing separators) are
/// skipped; an explicit `0` yields the zero polynomial.
pub fn parse_system<T: Real>(text: &str, nvars: usize) -> Result<Vec<Polynomial<T>>> {
    let toks = tokenize(text)?;
    let mut out = Vec::new();
    for chunk in split_statements(&toks) {
        if chunk.is_empty() {
            continue;
        }
        let mut p = Parser {
            toks: chunk,
            pos: 0,
            nvars,
            end: chunk.last().map_or(text.len(), |t| t.1 + 1),
        };
        let poly = p.expr()?;
        if p.pos != chunk.len() {
            return Err(Error::Syntax {
                pos: p.offset(),
                msg: "trailing input".into(),
            });
        }
        out.push(poly);
    }
    Ok(out)
}

/// Parses a single polynomial expression.
pub fn parse_polynomial<T: Real>(text: &str, nvars: usize) -> Result<Polynomial<T>> {
    let mut v = parse_system(text, nvars)?;
    match v.len() {
        1 => Ok(v.pop().unwrap()),
        0 => Err(Error::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        }),
        _ => Err(Error::Syntax {
            pos: 0,
            msg: "expected a single polynomial".into(),
        }),
    }
}

fn split_statements(toks: &[(Tok, usize)]) -> impl Iterator<Item = &[(Tok, usize)]> {
    toks.split(|t| t.0 == Tok::Sep)
}
