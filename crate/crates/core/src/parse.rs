//! Parser for polynomial text such as `x1^2 + 3*x2*x3^4 - 5`.
//!
//! Grammar: terms separated by `+` or `-`; a term is a product of factors,
//! each factor an integer, an identifier, or `identifier^integer`. Factors may
//! be joined by `*` or simply juxtaposed (`c^5b^3`). Whitespace is ignored.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::poly::{Monomial, SparsePolynomial};

pub fn parse_poly(text: &str, vars: &Arc<[String]>, field: FieldSpec) -> Result<SparsePolynomial> {
    Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
        field,
    }
    .parse()
}

/// Splits a comma-separated variable list and validates each identifier.
pub fn parse_vars(list: &str) -> Result<Arc<[String]>> {
    let names: Vec<String> = list
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::InvalidArgument("empty variable list".into()));
    }
    for name in &names {
        if !is_identifier(name) {
            return Err(Error::InvalidArgument(format!(
                "invalid variable name `{name}`"
            )));
        }
    }
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(Error::InvalidArgument(format!(
                "duplicate variable `{name}`"
            )));
        }
    }
    Ok(names.into())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Arc<[String]>,
    field: FieldSpec,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<SparsePolynomial> {
        let n = self.vars.len();
        let mut terms: Vec<(Monomial, i64)> = Vec::new();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            Some(_) => 1,
            None => return self.err("empty polynomial"),
        };
        loop {
            let (mono, coeff) = self.term(n)?;
            let c = if sign < 0 {
                self.field.neg(coeff)
            } else {
                coeff
            };
            terms.push((mono, c as i64));
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(c) => return self.err(format!("unexpected character `{}`", c as char)),
            }
            self.pos += 1;
        }
        Ok(SparsePolynomial::from_terms(
            self.field,
            self.vars.clone(),
            terms,
        ))
    }

    fn term(&mut self, n: usize) -> Result<(Monomial, u32)> {
        let mut exps = vec![0u32; n];
        let mut coeff = 1u32;
        let mut factors = 0usize;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let v = self.integer_mod_p();
                    coeff = self.field.mul(coeff, v);
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    let name = self.identifier().to_string();
                    let idx = self
                        .vars
                        .iter()
                        .position(|v| *v == name)
                        .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                    let mut exp = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        exp = self.exponent()?;
                    }
                    exps[idx] = exps[idx].checked_add(exp).ok_or(Error::Parse {
                        pos: start,
                        msg: "exponent overflow".into(),
                    })?;
                }
                _ => {
                    if factors == 0 {
                        return self.err("expected a term");
                    }
                    return self.err("expected a factor after `*`");
                }
            }
            factors += 1;
            match self.peek() {
                Some(b'*') => self.pos += 1,
                Some(c) if c.is_ascii_alphanumeric() => {}
                _ => break,
            }
        }
        Ok((Monomial::new(exps), coeff))
    }

    fn identifier(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }

    fn integer_mod_p(&mut self) -> u32 {
        let p = self.field.p() as u64;
        let mut v = 0u64;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            v = (v * 10 + (self.src[self.pos] - b'0') as u64) % p;
            self.pos += 1;
        }
        v as u32
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {}
            _ => return self.err("expected an integer exponent after `^`"),
        }
        let mut v = 0u32;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((self.src[self.pos] - b'0') as u32))
                .ok_or(Error::Parse {
                    pos: self.pos,
                    msg: "exponent overflow".into(),
                })?;
            self.pos += 1;
        }
        Ok(v)
    }
}
