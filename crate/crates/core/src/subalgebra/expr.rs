use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::deriv::DerivOp;
use crate::error::{invalid, Result};
use crate::poly::DiffPoly;

use super::SubalgebraSystem;

/// A polynomial expression in the generators of a differential subalgebra.
/// Leaves are (derivatives of) named generators, so anything built from this
/// tree lies in the subalgebra by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubExpr {
    /// `θ(generator)`; `theta` lists the exponent of each basic derivation.
    Gen { name: String, theta: Vec<u64> },
    Const {
        #[serde(with = "crate::coeff::coeff_text")]
        value: Coeff,
    },
    Add { terms: Vec<SubExpr> },
    Mul { factors: Vec<SubExpr> },
    Scale {
        #[serde(with = "crate::coeff::coeff_text")]
        coeff: Coeff,
        expr: Box<SubExpr>,
    },
}

impl SubExpr {
    pub fn zero() -> Self {
        SubExpr::Add { terms: Vec::new() }
    }

    pub fn gen(name: impl Into<String>, theta: &DerivOp) -> Self {
        SubExpr::Gen { name: name.into(), theta: theta.to_u64s().expect("small derivative orders") }
    }

    /// `c · self`, dropping unit factors.
    pub fn scaled(self, c: Coeff) -> Self {
        if num_traits::One::is_one(&c) {
            self
        } else {
            SubExpr::Scale { coeff: c, expr: Box::new(self) }
        }
    }

    /// Product, flattening nested products and dropping empty ones.
    pub fn product(factors: Vec<SubExpr>) -> Self {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                SubExpr::Mul { factors } => flat.extend(factors),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            SubExpr::Mul { factors: flat }
        }
    }

    pub fn sum(terms: Vec<SubExpr>) -> Self {
        let mut flat = Vec::new();
        for t in terms {
            match t {
                SubExpr::Add { terms } => flat.extend(terms),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            SubExpr::Add { terms: flat }
        }
    }

    /// Number of generator leaves.
    pub fn leaves(&self) -> usize {
        match self {
            SubExpr::Gen { .. } => 1,
            SubExpr::Const { .. } => 0,
            SubExpr::Add { terms } => terms.iter().map(SubExpr::leaves).sum(),
            SubExpr::Mul { factors } => factors.iter().map(SubExpr::leaves).sum(),
            SubExpr::Scale { expr, .. } => expr.leaves(),
        }
    }

    /// Evaluates in the system's algebra.
    pub fn evaluate(&self, sys: &SubalgebraSystem) -> Result<DiffPoly> {
        let alg = sys.algebra();
        match self {
            SubExpr::Gen { name, theta } => {
                if theta.len() != alg.derivations {
                    return invalid(format!("operator {theta:?} on `{name}` has the wrong number of derivations"));
                }
                Ok(sys.generator(name)?.apply_theta(&DerivOp::from_u64s(theta)))
            }
            SubExpr::Const { value } => Ok(DiffPoly::constant(alg, alg.ring.coerce(value.clone())?)),
            SubExpr::Add { terms } => {
                let mut acc = DiffPoly::zero(alg);
                for t in terms {
                    acc = acc.add(&t.evaluate(sys)?)?;
                }
                Ok(acc)
            }
            SubExpr::Mul { factors } => {
                let mut acc = DiffPoly::one(alg);
                for f in factors {
                    if acc.is_zero() {
                        break;
                    }
                    acc = acc.mul(&f.evaluate(sys)?)?;
                }
                Ok(acc)
            }
            SubExpr::Scale { coeff, expr } => Ok(expr.evaluate(sys)?.scale(&alg.ring.coerce(coeff.clone())?)),
        }
    }
}
