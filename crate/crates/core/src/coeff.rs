//! Exact coefficient rings.
//!
//! Every coefficient is stored as a [`BigRational`]; the ring decides which
//! values are legal and how results are reduced. Integers keep denominators
//! at one, and a prime field keeps residues in `0..p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, usage, Error, Result};

pub type Coeff = BigRational;

/// Largest accepted prime modulus (primality is checked by trial division).
pub const MAX_PRIME: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoeffRing {
    Rationals,
    Integers,
    PrimeField(u64),
}

impl Default for CoeffRing {
    fn default() -> Self {
        CoeffRing::Rationals
    }
}

impl CoeffRing {
    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("{p} is not a prime (moduli up to {MAX_PRIME} are supported)"));
        }
        Ok(CoeffRing::PrimeField(p))
    }

    pub fn gf2() -> Self {
        CoeffRing::PrimeField(2)
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, CoeffRing::Integers)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoeffRing::PrimeField(p) => *p,
            _ => 0,
        }
    }

    /// Maps an arbitrary rational into the ring, failing when that is impossible
    /// (a proper fraction over the integers, a denominator divisible by p).
    pub fn coerce(&self, value: Coeff) -> Result<Coeff> {
        match self {
            CoeffRing::Rationals => Ok(value),
            CoeffRing::Integers => {
                if value.is_integer() {
                    Ok(value)
                } else {
                    usage(format!("{value} is not an integer"))
                }
            }
            CoeffRing::PrimeField(p) => {
                let p = BigInt::from(*p);
                let num = value.numer().mod_floor(&p);
                let den = value.denom().mod_floor(&p);
                if den.is_zero() {
                    return usage(format!("{value} has no image modulo {p}"));
                }
                let inv = mod_inverse(&den, &p);
                Ok(Coeff::from_integer((num * inv).mod_floor(&p)))
            }
        }
    }

    /// Reduces a value already known to be representable (results of ring
    /// operations on ring elements).
    pub fn reduce(&self, value: Coeff) -> Coeff {
        match self {
            CoeffRing::PrimeField(p) => {
                debug_assert!(value.is_integer());
                Coeff::from_integer(value.to_integer().mod_floor(&BigInt::from(*p)))
            }
            _ => value,
        }
    }

    pub fn from_i64(&self, v: i64) -> Coeff {
        self.reduce(Coeff::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(&self, v: BigInt) -> Coeff {
        self.reduce(Coeff::from_integer(v))
    }

    pub fn one(&self) -> Coeff {
        self.from_i64(1)
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        self.reduce(-a)
    }

    /// Multiplicative inverse; only units have one.
    pub fn inv(&self, a: &Coeff) -> Result<Coeff> {
        if a.is_zero() {
            return usage("division by zero");
        }
        match self {
            CoeffRing::Rationals => Ok(a.recip()),
            CoeffRing::Integers => {
                if a.abs().is_one() {
                    Ok(a.clone())
                } else {
                    usage(format!("{a} is not a unit in Z"))
                }
            }
            CoeffRing::PrimeField(p) => {
                let p = BigInt::from(*p);
                Ok(Coeff::from_integer(mod_inverse(&a.to_integer(), &p)))
            }
        }
    }

    /// Symmetric representative used for printing: in GF(p), residues above
    /// p/2 are shown as negatives so that `x - y` reads naturally.
    pub fn display_value(&self, a: &Coeff) -> Coeff {
        match self {
            CoeffRing::PrimeField(p) if *p > 2 => {
                let p = BigInt::from(*p);
                let v = a.to_integer();
                if v.clone() * 2 > p {
                    Coeff::from_integer(v - p)
                } else {
                    a.clone()
                }
            }
            _ => a.clone(),
        }
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Rationals => write!(f, "Q"),
            CoeffRing::Integers => write!(f, "Z"),
            CoeffRing::PrimeField(2) => write!(f, "GF2"),
            CoeffRing::PrimeField(p) => write!(f, "Zp:{p}"),
        }
    }
}

impl FromStr for CoeffRing {
    type Err = Error;

    /// Accepts `Q`, `Z`, `GF2`, `GF(p)` and `Zp:p` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "q" | "rationals" => return Ok(CoeffRing::Rationals),
            "z" | "integers" => return Ok(CoeffRing::Integers),
            "gf2" => return Ok(CoeffRing::gf2()),
            _ => {}
        }
        let digits = t
            .strip_prefix("zp:")
            .or_else(|| t.strip_prefix("gf(").and_then(|r| r.strip_suffix(')')))
            .or_else(|| t.strip_prefix("gf"));
        match digits.and_then(|d| d.parse::<u64>().ok()) {
            Some(p) => CoeffRing::prime_field(p),
            None => invalid(format!("unknown coefficient ring `{s}` (expected Q, Z, GF2 or Zp:<prime>)")),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 || p > MAX_PRIME {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

/// Parses `a`, `-a` or `a/b` into an exact rational.
pub fn parse_coeff(s: &str) -> Option<Coeff> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Coeff::new(num, den))
}

/// Serde adapter writing coefficients as their decimal text (`-3/2`).
pub mod coeff_text {
    use super::{parse_coeff, Coeff};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Coeff, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&c.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Coeff, D::Error> {
        let text = String::deserialize(d)?;
        parse_coeff(&text).ok_or_else(|| de::Error::custom(format!("bad coefficient `{text}`")))
    }
}
