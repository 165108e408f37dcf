//! Sparse differential polynomials with exact coefficients.
//!
//! Two presentations are supported. [`Mode::Free`] is the free differential
//! algebra: every base variable admits every derivative. [`Mode::Quotient`]
//! is the polynomial presentation of the free algebra modulo the
//! differential ideal generated by `δ₁(x₂)` and `δ₂(x₁)`: `x₁` only carries
//! `δ₁`-towers, `x₂` only `δ₂`-towers, and the opposite derivation
//! annihilates them. Working in the quotient directly avoids normalizing
//! modulo that ideal.

mod grading;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, CoeffRing};
use crate::deriv::{DerivOp, DEFAULT_DERIVATIONS};
use crate::error::{invalid, usage, Result};

pub use grading::{Degree, GradeKey, Grading, GroupDegrees, MultiDegree};
pub use text::parse_monomial;

/// Base differential indeterminate. The derived order `x₁ < x₂ < q₀ < … < t`
/// is the canonical factor order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    X1,
    X2,
    Q(u32),
    T,
}

/// Variable groups that carry separate gradings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    X1,
    X2,
    Q,
    T,
}

impl Base {
    pub fn group(self) -> Group {
        match self {
            Base::X1 => Group::X1,
            Base::X2 => Group::X2,
            Base::Q(_) => Group::Q,
            Base::T => Group::T,
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Base::X1 | Base::X2)
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::X1 => write!(f, "x1"),
            Base::X2 => write!(f, "x2"),
            Base::Q(l) => write!(f, "q{l}"),
            Base::T => write!(f, "t"),
        }
    }
}

impl std::str::FromStr for Base {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x1" => Ok(Base::X1),
            "x2" => Ok(Base::X2),
            "t" => Ok(Base::T),
            _ => match s.strip_prefix('q').and_then(|d| d.parse::<u32>().ok()) {
                Some(l) if !s[1..].starts_with('+') => Ok(Base::Q(l)),
                _ => invalid(format!("unknown variable `{s}`")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Free differential algebra.
    Free,
    /// Quotient by the differential ideal generated by `δ₁(x₂)`, `δ₂(x₁)`.
    Quotient,
}

/// The algebra a polynomial lives in: coefficients, presentation and the
/// number of basic derivations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Algebra {
    pub ring: CoeffRing,
    pub mode: Mode,
    pub derivations: usize,
}

impl Algebra {
    pub fn free(ring: CoeffRing) -> Self {
        Algebra { ring, mode: Mode::Free, derivations: DEFAULT_DERIVATIONS }
    }

    pub fn quotient(ring: CoeffRing) -> Self {
        Algebra { ring, mode: Mode::Quotient, derivations: DEFAULT_DERIVATIONS }
    }

    pub fn with_derivations(ring: CoeffRing, mode: Mode, derivations: usize) -> Result<Self> {
        if derivations == 0 {
            return invalid("at least one derivation is required");
        }
        if mode == Mode::Quotient && derivations != 2 {
            return invalid("the quotient presentation is defined for exactly two derivations");
        }
        Ok(Algebra { ring, mode, derivations })
    }

    /// Whether `var` is one of the polynomial variables of this presentation.
    pub fn admits(&self, var: &DiffVar) -> bool {
        if var.theta.arity() != self.derivations {
            return false;
        }
        match (self.mode, var.base) {
            (Mode::Quotient, Base::X1) => var.theta.exp(1).is_zero(),
            (Mode::Quotient, Base::X2) => var.theta.exp(0).is_zero(),
            _ => true,
        }
    }

    /// `δ_index(var)`, or `None` when the derivation annihilates it.
    pub fn derive_var(&self, var: &DiffVar, index: usize) -> Option<DiffVar> {
        if self.mode == Mode::Quotient {
            match (var.base, index) {
                (Base::X1, 1) | (Base::X2, 0) => return None,
                _ => {}
            }
        }
        Some(DiffVar { base: var.base, theta: var.theta.bump(index) })
    }

    fn check(&self, other: &Algebra) -> Result<()> {
        if self != other {
            return usage(format!(
                "operands live in different algebras ({} {:?} vs {} {:?})",
                self.ring, self.mode, other.ring, other.mode
            ));
        }
        Ok(())
    }
}

/// A derived variable `θ(base)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiffVar {
    pub base: Base,
    pub theta: DerivOp,
}

impl DiffVar {
    pub fn new(base: Base, theta: DerivOp) -> Self {
        DiffVar { base, theta }
    }

    /// `δ₁^i δ₂^j(base)`.
    pub fn d2(base: Base, i: impl Into<BigUint>, j: impl Into<BigUint>) -> Self {
        DiffVar { base, theta: DerivOp::d2(i, j) }
    }

    pub fn plain(base: Base) -> Self {
        Self::d2(base, 0u32, 0u32)
    }
}

impl fmt::Display for DiffVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.base, self.theta)
    }
}

/// Product of derived variables, kept sorted with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Monomial(Vec<(DiffVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: DiffVar) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeats and
    /// dropping zero exponents.
    pub fn from_factors(factors: impl IntoIterator<Item = (DiffVar, u32)>) -> Self {
        let mut map: BTreeMap<DiffVar, u32> = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn factors(&self) -> &[(DiffVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    pub fn exponent_of(&self, v: &DiffVar) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(v)).map(|k| self.0[k].1).unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut rest = other.0.iter().peekable();
        for (v, e) in &self.0 {
            let mut e = *e;
            if let Some((w, f)) = rest.peek() {
                if w == v {
                    if *f > e {
                        return None;
                    }
                    e -= f;
                    rest.next();
                }
            }
            if e > 0 {
                out.push((v.clone(), e));
            }
        }
        if rest.next().is_some() {
            return None;
        }
        Some(Monomial(out))
    }

    /// The factor supported on `x₁`/`x₂`-variables.
    pub fn x_part(&self) -> Monomial {
        self.filter(|v| v.base.is_x())
    }

    /// Everything except the `x₁`/`x₂` factor.
    pub fn non_x_part(&self) -> Monomial {
        self.filter(|v| !v.base.is_x())
    }

    pub fn filter(&self, keep: impl Fn(&DiffVar) -> bool) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| keep(v)).cloned().collect())
    }

    /// Distinct bases occurring in the monomial.
    pub fn bases(&self) -> impl Iterator<Item = Base> + '_ {
        let mut last = None;
        self.0.iter().filter_map(move |(v, _)| {
            if last == Some(v.base) {
                None
            } else {
                last = Some(v.base);
                Some(v.base)
            }
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{v}^{e}")?;
        }
        Ok(())
    }
}

/// An element of a differential polynomial algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    alg: Algebra,
    terms: BTreeMap<Monomial, Coeff>,
}

impl DiffPoly {
    pub fn zero(alg: Algebra) -> Self {
        DiffPoly { alg, terms: BTreeMap::new() }
    }

    pub fn constant(alg: Algebra, c: Coeff) -> Self {
        Self::term(alg, c, Monomial::one())
    }

    pub fn one(alg: Algebra) -> Self {
        Self::constant(alg, alg.ring.one())
    }

    pub fn term(alg: Algebra, c: Coeff, m: Monomial) -> Self {
        let c = alg.ring.reduce(c);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { alg, terms }
    }

    pub fn monomial(alg: Algebra, m: Monomial) -> Self {
        Self::term(alg, alg.ring.one(), m)
    }

    /// The polynomial consisting of a single variable. Fails if the variable
    /// does not exist in this presentation.
    pub fn var(alg: Algebra, v: DiffVar) -> Result<Self> {
        if !alg.admits(&v) {
            return invalid(format!("{v} is not a variable of the {:?} presentation", alg.mode));
        }
        Ok(Self::monomial(alg, Monomial::var(v)))
    }

    /// Sums arbitrary terms, normalizing coefficients into the ring.
    pub fn from_terms(alg: Algebra, terms: impl IntoIterator<Item = (Coeff, Monomial)>) -> Self {
        let mut out = DiffPoly::zero(alg);
        for (c, m) in terms {
            out.add_term(&m, &c);
        }
        out
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn ring(&self) -> CoeffRing {
        self.alg.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Accumulates `c·m` in place.
    pub(crate) fn add_term(&mut self, m: &Monomial, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        let ring = self.alg.ring;
        match self.terms.get_mut(m) {
            Some(slot) => {
                let sum = ring.add(slot, c);
                if sum.is_zero() {
                    self.terms.remove(m);
                } else {
                    *slot = sum;
                }
            }
            None => {
                let c = ring.reduce(c.clone());
                if !c.is_zero() {
                    self.terms.insert(m.clone(), c);
                }
            }
        }
    }

    pub(crate) fn add_scaled_assign(&mut self, other: &DiffPoly, c: &Coeff) {
        let ring = self.alg.ring;
        for (m, d) in &other.terms {
            self.add_term(m, &ring.mul(c, d));
        }
    }

    pub fn add(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.alg.check(&other.alg)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.alg.check(&other.alg)?;
        let mut out = self.clone();
        let ring = self.alg.ring;
        for (m, c) in &other.terms {
            out.add_term(m, &ring.neg(c));
        }
        Ok(out)
    }

    pub fn neg(&self) -> DiffPoly {
        let ring = self.alg.ring;
        DiffPoly { alg: self.alg, terms: self.terms.iter().map(|(m, c)| (m.clone(), ring.neg(c))).collect() }
    }

    pub fn scale(&self, c: &Coeff) -> DiffPoly {
        let mut out = DiffPoly::zero(self.alg);
        out.add_scaled_assign(self, c);
        out
    }

    pub fn mul(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.alg.check(&other.alg)?;
        let ring = self.alg.ring;
        let mut out = DiffPoly::zero(self.alg);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(&m.mul(n), &ring.mul(c, d));
            }
        }
        Ok(out)
    }

    /// `c·m·self`.
    pub fn mul_term(&self, c: &Coeff, m: &Monomial) -> DiffPoly {
        let ring = self.alg.ring;
        let mut out = DiffPoly::zero(self.alg);
        for (n, d) in &self.terms {
            out.add_term(&m.mul(n), &ring.mul(c, d));
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one(self.alg);
        for _ in 0..e {
            acc = acc.mul(self).expect("same algebra");
        }
        acc
    }

    /// Applies the basic derivation `δ_{index+1}` (Leibniz rule on each term).
    pub fn derive(&self, index: usize) -> DiffPoly {
        assert!(index < self.alg.derivations, "derivation index {index} out of range");
        let ring = self.alg.ring;
        let mut out = DiffPoly::zero(self.alg);
        for (m, c) in &self.terms {
            for (k, (v, e)) in m.factors().iter().enumerate() {
                let Some(dv) = self.alg.derive_var(v, index) else { continue };
                let mut factors: Vec<(DiffVar, u32)> = Vec::with_capacity(m.factors().len() + 1);
                for (j, f) in m.factors().iter().enumerate() {
                    if j == k {
                        if *e > 1 {
                            factors.push((v.clone(), e - 1));
                        }
                    } else {
                        factors.push(f.clone());
                    }
                }
                factors.push((dv, 1));
                let dm = Monomial::from_factors(factors);
                out.add_term(&dm, &ring.mul(c, &ring.from_i64(i64::from(*e))));
            }
        }
        out
    }

    /// Applies a derivative operator by iterating basic derivations.
    pub fn apply_theta(&self, theta: &DerivOp) -> DiffPoly {
        assert_eq!(theta.arity(), self.alg.derivations, "operator arity does not match the algebra");
        let exps = theta.to_u64s().expect("derivative order too large to apply");
        let mut out = self.clone();
        for (index, e) in exps.into_iter().enumerate() {
            for _ in 0..e {
                if out.is_zero() {
                    return out;
                }
                out = out.derive(index);
            }
        }
        out
    }

    /// Re-embeds the terms into another algebra (e.g. to switch coefficient
    /// rings); fails if a coefficient or variable has no image there.
    pub fn convert(&self, alg: Algebra) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero(alg);
        for (m, c) in &self.terms {
            if let Some((v, _)) = m.factors().iter().find(|(v, _)| !alg.admits(v)) {
                return invalid(format!("{v} is not a variable of the {:?} presentation", alg.mode));
            }
            out.add_term(m, &alg.ring.coerce(c.clone())?);
        }
        Ok(out)
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> DiffPoly {
        DiffPoly {
            alg: self.alg,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Image in the quotient presentation: variables `θ(x₁)` with a `δ₂`
    /// and `θ(x₂)` with a `δ₁` lie in the ideal divided out and map to zero.
    pub fn quotient_image(&self) -> Result<DiffPoly> {
        let target = Algebra::with_derivations(self.alg.ring, Mode::Quotient, self.alg.derivations)?;
        if self.alg.mode == Mode::Quotient {
            return Ok(self.clone());
        }
        let mut out = DiffPoly::zero(target);
        for (m, c) in &self.terms {
            if m.factors().iter().all(|(v, _)| target.admits(v)) {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Distinct bases occurring anywhere in the polynomial.
    pub fn bases(&self) -> std::collections::BTreeSet<Base> {
        self.terms.keys().flat_map(|m| m.bases()).collect()
    }
}
