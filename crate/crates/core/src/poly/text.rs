//! Canonical text form.
//!
//! A polynomial prints as a sum of terms in ascending monomial order,
//! `c * f * … ± …`, where each factor is `base[i,j]^e` for `(δ₁^i δ₂^j base)^e`.
//! Unit coefficients are omitted and the zero polynomial prints as `0`. The
//! parser accepts exactly this grammar (plus insignificant whitespace, bare
//! variables without brackets and omitted `^1`).

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use super::{Algebra, Base, DiffPoly, DiffVar, Monomial};
use crate::coeff::{parse_coeff, Coeff};
use crate::deriv::DerivOp;
use crate::error::{Error, Result};

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let ring = self.ring();
        for (k, (m, c)) in self.terms().enumerate() {
            let shown = ring.display_value(c);
            let negative = shown.is_negative();
            let mag = shown.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag} * {m}")?;
            }
        }
        Ok(())
    }
}

impl DiffPoly {
    pub fn parse(alg: Algebra, text: &str) -> Result<DiffPoly> {
        let mut p = Parser { src: text, pos: 0, alg };
        let out = p.poly()?;
        p.ws();
        if p.pos != text.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

/// Parses a single monomial (no coefficient).
pub fn parse_monomial(alg: Algebra, text: &str) -> Result<Monomial> {
    let p = DiffPoly::parse(alg, text)?;
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if c.is_one() => Ok(m.clone()),
        _ => Err(Error::Parse { pos: 0, msg: format!("`{text}` is not a single monomial") }),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    alg: Algebra,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        let src: &'a str = self.src;
        (self.pos > start).then(|| &src[start..self.pos])
    }

    fn poly(&mut self) -> Result<DiffPoly> {
        let ring = self.alg.ring;
        let mut out = DiffPoly::zero(self.alg);
        let mut negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        loop {
            let (c, m) = self.term()?;
            let c = if negative { -c } else { c };
            let c = ring.coerce(c).map_err(|e| self.err(&e.to_string()))?;
            out.add_term(&m, &c);
            self.ws();
            match self.peek() {
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Coeff, Monomial)> {
        let mut coeff = Coeff::one();
        let mut factors = Vec::new();
        loop {
            self.ws();
            match self.peek() {
                Some(b) if b.is_ascii_digit() => coeff *= self.number()?,
                Some(b) if b.is_ascii_lowercase() => factors.push(self.factor()?),
                _ => return Err(self.err("expected a coefficient or a variable")),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((coeff, Monomial::from_factors(factors)))
    }

    fn number(&mut self) -> Result<Coeff> {
        let start = self.pos;
        self.digits();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            if self.digits().is_none() {
                return Err(self.err("expected a denominator"));
            }
        }
        parse_coeff(&self.src[start..self.pos]).ok_or_else(|| Error::Parse { pos: start, msg: "bad coefficient".into() })
    }

    fn factor(&mut self) -> Result<(DiffVar, u32)> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let base: Base = self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: format!("unknown variable `{}`", &self.src[start..self.pos]) })?;
        let theta = if self.peek() == Some(b'[') {
            self.pos += 1;
            let mut exps = Vec::new();
            loop {
                self.ws();
                let d = self.digits().ok_or_else(|| self.err("expected a derivative exponent"))?;
                exps.push(d.parse::<BigUint>().expect("digits"));
                if self.eat(b']') {
                    break;
                }
                if !self.eat(b',') {
                    return Err(self.err("expected `,` or `]`"));
                }
            }
            DerivOp::new(exps)
        } else {
            DerivOp::identity(self.alg.derivations)
        };
        let var = DiffVar::new(base, theta);
        if !self.alg.admits(&var) {
            return Err(Error::Parse {
                pos: start,
                msg: format!("{var} is not a variable of the {:?} presentation", self.alg.mode),
            });
        }
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            let d = self.digits().ok_or_else(|| self.err("expected an exponent"))?;
            d.parse::<u32>().map_err(|_| self.err("exponent out of range"))?
        } else {
            1
        };
        if exp.is_zero() {
            return Err(self.err("zero exponent"));
        }
        Ok((var, exp))
    }
}
