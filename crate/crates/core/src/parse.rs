//! Recursive-descent parser for symbol expressions.
//!
//! ```text
//! sum     := unary (("+" | "-") unary)*
//! unary   := ("-" | "+") unary | product
//! product := power (("*" | "/") power)*
//! power   := atom ("^" ("-")? power)?
//! atom    := integer | "hbar" | "i" | q<k> | p<k> | "(" sum ")"
//! ```
//!
//! Unary minus binds looser than `*`, so `-a*b` is `-(a*b)`; `^` is
//! right-associative and its exponent must reduce to a nonnegative integer.
//! Division is only by nonzero constants. There is no implicit
//! multiplication.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::ParseError;
use crate::scalar::Scalar;
use crate::symbol::{PhaseSpace, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
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
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        if b.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos < bytes.len() && (bytes[pos] == b'.' || bytes[pos].is_ascii_alphabetic()) {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("unexpected `{}` after number", bytes[pos] as char),
                    });
                }
                out.push((start, Tok::Int(text[start..pos].parse().expect("digits"))));
                continue;
            }
            b if b.is_ascii_alphabetic() => {
                while pos < bytes.len() && bytes[pos].is_ascii_alphanumeric() {
                    pos += 1;
                }
                out.push((start, Tok::Ident(text[start..pos].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{ch}`") });
            }
        };
        out.push((start, tok));
        pos += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    cursor: usize,
    space: PhaseSpace,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.cursor].1
    }

    fn pos(&self) -> usize {
        self.tokens[self.cursor].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.tokens[self.cursor].clone();
        if t.1 != Tok::End {
            self.cursor += 1;
        }
        t
    }

    fn sum(&mut self) -> Result<Symbol, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc + self.unary()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc - self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Symbol, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.product(),
        }
    }

    fn product(&mut self) -> Result<Symbol, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.power()?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let divisor = self.power()?;
                    let c = divisor.as_constant().filter(|c| !c.is_zero()).ok_or(ParseError::BadDivisor { pos })?;
                    let inv = c.inv().map_err(|_| ParseError::BadDivisor { pos })?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Symbol, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let exponent = self.power()?;
        let e = exponent.as_constant().and_then(|c| c.as_u32()).ok_or(ParseError::BadExponent { pos })?;
        if negative && e != 0 {
            return Err(ParseError::BadExponent { pos });
        }
        let mut acc = Symbol::one(base.dim());
        for _ in 0..e {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Symbol, ParseError> {
        let (pos, tok) = self.bump();
        match tok {
            Tok::Int(v) => Ok(self.space.constant(Scalar::real(BigRational::from_integer(v)))),
            Tok::Ident(name) => match name.as_str() {
                "hbar" => Ok(self.space.hbar()),
                "i" => Ok(self.space.constant(Scalar::i())),
                _ => self
                    .space
                    .coordinate_index(&name)
                    .map(|idx| self.space.coordinate(idx))
                    .ok_or(ParseError::UnknownVariable { pos, name }),
            },
            Tok::LParen => {
                let inner = self.sum()?;
                let (close, t) = self.bump();
                if t != Tok::RParen {
                    return Err(ParseError::Syntax { pos: close, msg: "expected `)`".into() });
                }
                Ok(inner)
            }
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            other => Err(ParseError::Syntax { pos, msg: format!("unexpected {}", describe(&other)) }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses and fully expands an expression over `space`.
pub fn parse_symbol(text: &str, space: PhaseSpace) -> Result<Symbol, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, cursor: 0, space };
    let s = p.sum()?;
    match p.peek() {
        Tok::End => Ok(s),
        t => Err(ParseError::Syntax { pos: p.pos(), msg: format!("unexpected {}", describe(t)) }),
    }
}

/// Parses a rational literal `[+-]digits[/digits]` with a nonzero denominator.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let digits = num.strip_prefix(['-', '+']).unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = match den {
        None => BigInt::from(1),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            d.parse().ok()?
        }
    };
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}
