//! Recursive-descent parser for the polynomial grammar.
//!
//! ```text
//! expr   := ['-' | '+'] term { ('+' | '-') term }
//! term   := factor { '*' factor }
//! factor := atom [ '^' integer ]
//! atom   := number | identifier | '(' expr ')'
//! number := integer [ '/' integer ]
//! ```
//!
//! Identifiers match `[a-zA-Z][a-zA-Z0-9_]*`; whitespace is insignificant;
//! implicit multiplication is rejected.

use super::{MultiPoly, VarSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Int(text.parse().unwrap())
            }
            c if c.is_ascii_alphabetic() => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Ident(text.to_string())
            }
            other => {
                return Err(ParseError::SyntaxError {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((tok, start)))
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    universe: &'a VarSet,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.idx)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::SyntaxError {
            pos: self.here(),
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut negate = false;
        match self.peek() {
            Some((Tok::Minus, _)) => {
                self.next();
                negate = true;
            }
            Some((Tok::Plus, _)) => {
                self.next();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some((Tok::Plus, _)) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some((Tok::Minus, _)) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.factor()?;
        while let Some((Tok::Star, _)) = self.peek() {
            self.next();
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.next();
            match self.next() {
                Some((Tok::Int(k), pos)) => {
                    let k: u32 = k.try_into().map_err(|_| ParseError::SyntaxError {
                        pos,
                        msg: "exponent out of range".into(),
                    })?;
                    return Ok(base.pow(k));
                }
                _ => return Err(self.err("expected a non-negative integer exponent after `^`")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        match self.next() {
            Some((Tok::Int(n), _)) => {
                // Optional rational literal a/b.
                if let Some((Tok::Slash, _)) = self.peek() {
                    self.next();
                    match self.next() {
                        Some((Tok::Int(d), pos)) => {
                            if d.is_zero() {
                                return Err(ParseError::SyntaxError {
                                    pos,
                                    msg: "zero denominator".into(),
                                });
                            }
                            Ok(MultiPoly::constant(self.universe, BigRational::new(n, d)))
                        }
                        _ => Err(self.err("expected an integer denominator after `/`")),
                    }
                } else {
                    Ok(MultiPoly::constant(
                        self.universe,
                        BigRational::from_integer(n),
                    ))
                }
            }
            Some((Tok::Ident(name), pos)) => MultiPoly::var(self.universe, &name)
                .ok_or(ParseError::UnknownVariable { name, pos }),
            Some((Tok::LParen, _)) => {
                let e = self.expr()?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(e),
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some((t, pos)) => Err(ParseError::SyntaxError {
                pos,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub(super) fn parse(text: &str, universe: &VarSet) -> Result<MultiPoly, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        universe,
        end: text.len(),
    };
    let poly = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(poly)
}
