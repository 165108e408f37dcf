//! Derivative operators: elements of the free commutative monoid on the
//! basic derivations.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Number of basic derivations used by the machine encoding.
pub const DEFAULT_DERIVATIONS: usize = 2;

/// `δ₁^{e₁}…δ_m^{e_m}`, stored as its exponent vector.
///
/// Exponents are arbitrary precision: test elements carry towers like
/// `δ₁^(2^(2^m))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DerivOp(Vec<BigUint>);

impl DerivOp {
    pub fn new(exps: Vec<BigUint>) -> Self {
        DerivOp(exps)
    }

    pub fn identity(m: usize) -> Self {
        DerivOp(vec![BigUint::zero(); m])
    }

    /// The single derivation `δ_{index+1}` (indices are 0-based).
    pub fn delta(index: usize, m: usize) -> Self {
        let mut op = Self::identity(m);
        op.0[index] = 1u32.into();
        op
    }

    pub fn from_u64s(exps: &[u64]) -> Self {
        DerivOp(exps.iter().map(|&e| BigUint::from(e)).collect())
    }

    /// Shorthand for the two-derivation operator `δ₁^i δ₂^j`.
    pub fn d2(i: impl Into<BigUint>, j: impl Into<BigUint>) -> Self {
        DerivOp(vec![i.into(), j.into()])
    }

    pub fn exps(&self) -> &[BigUint] {
        &self.0
    }

    pub fn exp(&self, index: usize) -> &BigUint {
        &self.0[index]
    }

    /// Number of basic derivations this operator ranges over.
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn order(&self) -> BigUint {
        self.0.iter().sum()
    }

    /// Composition; the monoid is commutative, so this is exponent addition.
    pub fn compose(&self, other: &DerivOp) -> DerivOp {
        assert_eq!(self.arity(), other.arity(), "derivative operators over different derivation sets");
        DerivOp(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn bump(&self, index: usize) -> DerivOp {
        let mut out = self.clone();
        out.0[index] += 1u32;
        out
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &DerivOp) -> Option<DerivOp> {
        if self.arity() != other.arity() {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(DerivOp(out))
    }

    /// Exponents as machine integers, if they all fit.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.0.iter().map(|e| e.to_u64()).collect()
    }

    /// All divisors `θ₁` of `self`, in lexicographic order of exponents.
    /// Only meaningful for small operators.
    pub fn divisors(&self) -> Vec<DerivOp> {
        let bounds = self.to_u64s().expect("divisor enumeration needs machine-sized exponents");
        let mut out = vec![Vec::new()];
        for b in bounds {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (0..=b).map(move |e| {
                        let mut p = prefix.clone();
                        p.push(e);
                        p
                    })
                })
                .collect();
        }
        out.iter().map(|v| DerivOp::from_u64s(v)).collect()
    }
}

impl fmt::Display for DerivOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// Multi-index binomial `∏ C(θ_k, ρ_k)`, for `ρ | θ` with small exponents.
pub fn binomial(theta: &DerivOp, rho: &DerivOp) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for (n, k) in theta.exps().iter().zip(rho.exps()) {
        let n = n.to_u64().expect("binomial of huge exponent");
        let k = k.to_u64().expect("binomial of huge exponent");
        acc *= binom_u64(n, k);
    }
    acc
}

fn binom_u64(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_commutative_and_additive() {
        let a = DerivOp::d2(2u32, 0u32);
        let b = DerivOp::d2(1u32, 3u32);
        assert_eq!(a.compose(&b), b.compose(&a));
        assert_eq!(a.compose(&b), DerivOp::d2(3u32, 3u32));
        assert_eq!(a.compose(&b).order(), BigUint::from(6u32));
    }

    #[test]
    fn division_and_divisors() {
        let t = DerivOp::d2(1u32, 2u32);
        assert_eq!(t.checked_div(&DerivOp::d2(1u32, 1u32)), Some(DerivOp::d2(0u32, 1u32)));
        assert_eq!(t.checked_div(&DerivOp::d2(2u32, 0u32)), None);
        assert_eq!(t.divisors().len(), 6);
        assert_eq!(binomial(&t, &DerivOp::d2(1u32, 1u32)), BigUint::from(2u32));
    }

    #[test]
    fn display() {
        assert_eq!(DerivOp::d2(0u32, 5u32).to_string(), "[0,5]");
        assert_eq!(DerivOp::identity(3).to_string(), "[0,0,0]");
    }
}
