//! Operators of the universal enveloping ring.
//!
//! Every operator is kept in the normal form `Σ_θ P_θ·θ` with polynomial
//! coefficients to the left of derivative operators. Products are normalized
//! with the commutation rule `δᵢ·r = r·δᵢ + δᵢ(r)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::deriv::DerivOp;
use crate::error::{invalid, usage, Error, Result};
use crate::poly::{Algebra, Base, DiffPoly, DiffVar, Monomial};
use crate::serde_util::biguint_num;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvOperator {
    alg: Algebra,
    terms: BTreeMap<DerivOp, DiffPoly>,
}

impl EnvOperator {
    pub fn zero(alg: Algebra) -> Self {
        EnvOperator { alg, terms: BTreeMap::new() }
    }

    pub fn identity(alg: Algebra) -> Self {
        Self::from_term(DiffPoly::one(alg), DerivOp::identity(alg.derivations))
    }

    /// `coeff·θ` for a polynomial coefficient.
    pub fn from_term(coeff: DiffPoly, theta: DerivOp) -> Self {
        let mut out = EnvOperator::zero(coeff.algebra());
        out.add_term(coeff, theta);
        out
    }

    /// `c·v·θ`.
    pub fn monomial(alg: Algebra, c: Coeff, v: Monomial, theta: DerivOp) -> Self {
        Self::from_term(DiffPoly::term(alg, c, v), theta)
    }

    /// The basic derivation `δ_{index+1}` as an operator.
    pub fn delta(alg: Algebra, index: usize) -> Self {
        Self::from_term(DiffPoly::one(alg), DerivOp::delta(index, alg.derivations))
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(θ, P_θ)` pairs in ascending `θ`.
    pub fn terms(&self) -> impl Iterator<Item = (&DerivOp, &DiffPoly)> {
        self.terms.iter()
    }

    /// Expanded `(c, v, θ)` triples.
    pub fn triples(&self) -> Vec<(Coeff, Monomial, DerivOp)> {
        self.terms
            .iter()
            .flat_map(|(theta, p)| p.terms().map(move |(m, c)| (c.clone(), m.clone(), theta.clone())))
            .collect()
    }

    fn add_term(&mut self, coeff: DiffPoly, theta: DerivOp) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&theta) {
            Some(prev) => prev.add(&coeff).expect("same algebra"),
            None => coeff,
        };
        if !merged.is_zero() {
            self.terms.insert(theta, merged);
        }
    }

    pub fn add(&self, other: &EnvOperator) -> Result<EnvOperator> {
        if self.alg != other.alg {
            return usage("operators over different algebras");
        }
        let mut out = self.clone();
        for (theta, p) in &other.terms {
            out.add_term(p.clone(), theta.clone());
        }
        Ok(out)
    }

    /// `r·self`.
    pub fn left_mul_poly(&self, r: &DiffPoly) -> Result<EnvOperator> {
        let mut out = EnvOperator::zero(self.alg);
        for (theta, p) in &self.terms {
            out.add_term(r.mul(p)?, theta.clone());
        }
        Ok(out)
    }

    /// `δ_index·self`, rewritten with `δᵢ·P = P·δᵢ + δᵢ(P)`.
    pub fn left_delta(&self, index: usize) -> EnvOperator {
        let mut out = EnvOperator::zero(self.alg);
        for (theta, p) in &self.terms {
            out.add_term(p.clone(), theta.bump(index));
            out.add_term(p.derive(index), theta.clone());
        }
        out
    }

    /// `self ∘ other`, in normal form.
    pub fn compose(&self, other: &EnvOperator) -> Result<EnvOperator> {
        if self.alg != other.alg {
            return usage("operators over different algebras");
        }
        let mut out = EnvOperator::zero(self.alg);
        for (theta, p) in &self.terms {
            let exps = theta.to_u64s().ok_or_else(|| Error::Resource("operator order too large to compose".into()))?;
            let mut acc = other.clone();
            for (index, e) in exps.into_iter().enumerate() {
                for _ in 0..e {
                    acc = acc.left_delta(index);
                }
            }
            out = out.add(&acc.left_mul_poly(p)?)?;
        }
        Ok(out)
    }

    /// Action on a polynomial: `Σ P_θ·θ(a)`.
    pub fn apply(&self, a: &DiffPoly) -> Result<DiffPoly> {
        if self.alg != a.algebra() {
            return usage("operator and polynomial live in different algebras");
        }
        let mut out = DiffPoly::zero(self.alg);
        for (theta, p) in &self.terms {
            out = out.add(&p.mul(&a.apply_theta(theta))?)?;
        }
        Ok(out)
    }

    pub fn parse(alg: Algebra, text: &str) -> Result<EnvOperator> {
        let mut out = EnvOperator::zero(alg);
        if text.trim() == "0" {
            return Ok(out);
        }
        for part in text.split(';') {
            let (poly, theta) = part
                .split_once("::")
                .ok_or_else(|| Error::Parse { pos: 0, msg: format!("operator term `{}` lacks `::`", part.trim()) })?;
            let theta = theta.trim();
            let inner = theta
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| Error::Parse { pos: 0, msg: format!("bad derivative operator `{theta}`") })?;
            let exps = inner
                .split(',')
                .map(|e| e.trim().parse::<BigUint>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse { pos: 0, msg: format!("bad derivative operator `{theta}`") })?;
            if exps.len() != alg.derivations {
                return invalid(format!("operator `{theta}` has the wrong number of derivations"));
            }
            out.add_term(DiffPoly::parse(alg, poly)?, DerivOp::new(exps));
        }
        Ok(out)
    }
}

impl fmt::Display for EnvOperator {
    /// `P :: [i,j] ; P' :: [i',j']`, ascending in the derivative operator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (theta, p)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{p} :: {theta}")?;
        }
        Ok(())
    }
}

fn check_bit(name: &str, v: u8) -> Result<()> {
    if v > 1 {
        return invalid(format!("{name} must be 0 or 1, got {v}"));
    }
    Ok(())
}

/// `x₁^{1−ε} x₂^{1−σ} δ₁^i δ₂^j` with `i = 0` when `ε = 1` and `j = 0` when
/// `σ = 1`: the operators that turn one generator into one machine step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WOperator {
    pub eps: u8,
    pub sigma: u8,
    #[serde(with = "biguint_num")]
    pub i: BigUint,
    #[serde(with = "biguint_num")]
    pub j: BigUint,
}

impl WOperator {
    pub fn new(eps: u8, sigma: u8, i: impl Into<BigUint>, j: impl Into<BigUint>) -> Result<Self> {
        let w = WOperator { eps, sigma, i: i.into(), j: j.into() };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        check_bit("eps", self.eps)?;
        check_bit("sigma", self.sigma)?;
        if self.eps == 1 && !self.i.is_zero() {
            return invalid(format!("W operator with eps = 1 must have i = 0, got {}", self.i));
        }
        if self.sigma == 1 && !self.j.is_zero() {
            return invalid(format!("W operator with sigma = 1 must have j = 0, got {}", self.j));
        }
        Ok(())
    }

    pub fn multiplier(&self) -> Monomial {
        Monomial::from_factors([
            (DiffVar::plain(Base::X1), u32::from(1 - self.eps)),
            (DiffVar::plain(Base::X2), u32::from(1 - self.sigma)),
        ])
    }

    pub fn theta(&self) -> DerivOp {
        DerivOp::d2(self.i.clone(), self.j.clone())
    }

    pub fn to_operator(&self, alg: Algebra) -> Result<EnvOperator> {
        self.validate()?;
        Ok(EnvOperator::monomial(alg, alg.ring.one(), self.multiplier(), self.theta()))
    }
}

/// `(δ₁^a(x₁))^{1−ε} (δ₂^b(x₂))^{1−σ} δ₁^s δ₂^t`. The prefactor exponent `a`
/// (resp. `b`) is unused and must be zero when `ε = 1` (resp. `σ = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VOperator {
    pub eps: u8,
    pub sigma: u8,
    pub a: u32,
    pub b: u32,
    pub s: u32,
    pub t: u32,
}

impl VOperator {
    pub fn new(eps: u8, sigma: u8, a: u32, b: u32, s: u32, t: u32) -> Result<Self> {
        let v = VOperator { eps, sigma, a, b, s, t };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        check_bit("eps", self.eps)?;
        check_bit("sigma", self.sigma)?;
        if self.eps == 1 && self.a != 0 {
            return invalid("V operator with eps = 1 has no x1 prefactor (a must be 0)");
        }
        if self.sigma == 1 && self.b != 0 {
            return invalid("V operator with sigma = 1 has no x2 prefactor (b must be 0)");
        }
        Ok(())
    }

    pub fn multiplier(&self) -> Monomial {
        Monomial::from_factors([
            (DiffVar::d2(Base::X1, self.a, 0u32), u32::from(1 - self.eps)),
            (DiffVar::d2(Base::X2, 0u32, self.b), u32::from(1 - self.sigma)),
        ])
    }

    pub fn theta(&self) -> DerivOp {
        DerivOp::d2(self.s, self.t)
    }

    pub fn to_operator(&self, alg: Algebra) -> Result<EnvOperator> {
        self.validate()?;
        Ok(EnvOperator::monomial(alg, alg.ring.one(), self.multiplier(), self.theta()))
    }

    /// The same operator viewed in `W_{εσ}`, if it lies there.
    pub fn as_w(&self) -> Option<WOperator> {
        let in_w = self.a == 0 && self.b == 0 && (self.eps == 0 || self.s == 0) && (self.sigma == 0 || self.t == 0);
        in_w.then(|| WOperator { eps: self.eps, sigma: self.sigma, i: self.s.into(), j: self.t.into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffRing;

    fn alg() -> Algebra {
        Algebra::quotient(CoeffRing::Rationals)
    }

    fn p(s: &str) -> DiffPoly {
        DiffPoly::parse(alg(), s).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let a = p("x1[1,0]^2 * q0[0,3]^1 - 4 * q2[1,1]^1");
        assert_eq!(EnvOperator::identity(alg()).apply(&a).unwrap(), a);
    }

    #[test]
    fn w_operator_embedding() {
        assert_eq!(WOperator::new(1, 1, 0u32, 0u32).unwrap().to_operator(alg()).unwrap(), EnvOperator::identity(alg()));
        let w = WOperator::new(1, 0, 0u32, 3u32).unwrap().to_operator(alg()).unwrap();
        assert_eq!(w.to_string(), "x2[0,0]^1 :: [0,3]");
        assert!(WOperator::new(1, 0, 1u32, 0u32).is_err());
        assert!(WOperator::new(0, 1, 0u32, 2u32).is_err());
        assert!(VOperator::new(1, 0, 1, 0, 0, 0).is_err());
    }

    #[test]
    fn v_operator_w_restriction() {
        assert!(VOperator::new(0, 0, 0, 0, 2, 3).unwrap().as_w().is_some());
        assert!(VOperator::new(0, 0, 1, 0, 2, 3).unwrap().as_w().is_none());
        assert!(VOperator::new(1, 0, 0, 0, 2, 3).unwrap().as_w().is_none());
    }

    #[test]
    fn commutation_rule() {
        // (δ₁ ∘ r)(a) = r·δ₁(a) + δ₁(r)·a = δ₁(r·a)
        let r = p("x1[0,0]^1 * q1[0,1]^1");
        let a = p("x1[2,0]^1 + q0[1,0]^2");
        let lhs = EnvOperator::delta(alg(), 0).compose(&EnvOperator::from_term(r.clone(), DerivOp::d2(0u32, 0u32))).unwrap();
        assert_eq!(lhs.apply(&a).unwrap(), r.mul(&a).unwrap().derive(0));
        let rhs = EnvOperator::from_term(r.clone(), DerivOp::d2(1u32, 0u32))
            .add(&EnvOperator::from_term(r.derive(0), DerivOp::d2(0u32, 0u32)))
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_associative_in_action() {
        let o1 = EnvOperator::parse(alg(), "x2[0,1]^1 :: [1,1] ; 3 :: [0,0]").unwrap();
        let o2 = EnvOperator::parse(alg(), "x1[0,0]^1 * q0[0,0]^1 :: [2,0]").unwrap();
        let a = p("x1[0,0]^1 * q1[0,1]^1 - q2[0,0]^2");
        let composed = o1.compose(&o2).unwrap().apply(&a).unwrap();
        assert_eq!(composed, o1.apply(&o2.apply(&a).unwrap()).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let s = "x2[0,0]^1 :: [0,3] ; x1[1,0]^1 - q0[0,0]^1 :: [2,1]";
        let op = EnvOperator::parse(alg(), s).unwrap();
        assert_eq!(EnvOperator::parse(alg(), &op.to_string()).unwrap(), op);
        assert_eq!(EnvOperator::parse(alg(), "0").unwrap().to_string(), "0");
    }
}
