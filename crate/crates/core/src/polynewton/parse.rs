//! Text grammar for polynomials:
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := integer ['/' integer] | 'x' digit ['^' integer]
//! ```
//! Variables are `x1` .. `x9`; whitespace is ignored.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::poly::{Rat, SparsePoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("negative exponent at position {pos}")]
    NegativeExponent { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::NegativeExponent { pos } => *pos,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    /// Returns (coefficient, list of (variable index, exponent)).
    fn term(&mut self) -> Result<(Rat, Vec<(usize, u32)>), ParseError> {
        let mut coef = Rat::one();
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(b'x') => {
                    self.pos += 1;
                    let idx_pos = self.pos;
                    let Some(&c) = self.src.get(self.pos) else {
                        return Err(self.err("expected a variable index"));
                    };
                    if !(b'1'..=b'9').contains(&c) {
                        return Err(ParseError::Syntax { pos: idx_pos, message: "variables are x1..x9".into() });
                    }
                    self.pos += 1;
                    if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                        return Err(ParseError::Syntax { pos: idx_pos, message: "variables are x1..x9".into() });
                    }
                    let idx = (c - b'1') as usize;
                    let mut exp = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let epos = {
                            self.skip_ws();
                            self.pos
                        };
                        if self.peek() == Some(b'-') {
                            return Err(ParseError::NegativeExponent { pos: epos });
                        }
                        let e = self.integer()?;
                        exp = u32::try_from(e).map_err(|_| ParseError::Syntax { pos: epos, message: "exponent too large".into() })?;
                    }
                    vars.push((idx, exp));
                }
                Some(c) if c.is_ascii_digit() => {
                    let num = self.integer()?;
                    let mut value = Rat::from_integer(num);
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let dpos = self.pos;
                        let den = self.integer()?;
                        if den.is_zero() {
                            return Err(ParseError::Syntax { pos: dpos, message: "zero denominator".into() });
                        }
                        value /= Rat::from_integer(den);
                    }
                    coef *= value;
                }
                _ => return Err(self.err("expected a number or a variable")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((coef, vars));
            }
        }
    }
}

/// Parses with the variable count set to the largest index used (at least 1).
pub fn parse_poly(text: &str) -> Result<SparsePoly, ParseError> {
    parse_poly_in(text, 0)
}

/// Parses into a ring with at least `min_vars` variables.
pub fn parse_poly_in(text: &str, min_vars: usize) -> Result<SparsePoly, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut raw: Vec<(Rat, Vec<(usize, u32)>)> = Vec::new();
    let mut sign = Rat::one();
    match p.peek() {
        Some(b'-') => {
            p.pos += 1;
            sign = -Rat::one();
        }
        Some(b'+') => p.pos += 1,
        None => return Err(p.err("empty polynomial")),
        _ => {}
    }
    loop {
        let (c, vars) = p.term()?;
        raw.push((sign * c, vars));
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.pos += 1;
                sign = Rat::one();
            }
            Some(b'-') => {
                p.pos += 1;
                sign = -Rat::one();
            }
            Some(_) => return Err(p.err("expected '+', '-' or '*'")),
        }
    }
    let nvars = raw
        .iter()
        .flat_map(|(_, v)| v.iter().map(|(i, _)| i + 1))
        .max()
        .unwrap_or(1)
        .max(min_vars)
        .max(1);
    let mut poly = SparsePoly::zero(nvars);
    for (c, vars) in raw {
        let mut e = vec![0u32; nvars];
        for (i, k) in vars {
            e[i] += k;
        }
        poly.add_term(e, c);
    }
    Ok(poly)
}
