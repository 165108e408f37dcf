//! Ideal membership transported to subalgebra membership.
//!
//! For an ideal `I = [f₁, …, f_r]` over the `x`-variables, adjoin a fresh
//! differential variable `t` and let `S_I` be the differential subalgebra
//! generated by the `x`-variables, the first derivatives `δ_k(t)` and the
//! products `t·f_i`. Then `f ∈ I` exactly when `t·f ∈ S_I`. This module turns
//! ideal witnesses into explicit subalgebra expressions and back.

mod expr;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use expr::SubExpr;

use crate::coeff::Coeff;
use crate::deriv::{binomial, DerivOp};
use crate::encoder::{parse_in, EncodedSystem};
use crate::error::{invalid, usage, Error, Result};
use crate::membership::{Oracle, OracleBounds, OracleOutcome, OracleTerm, Verdict};
use crate::poly::{Algebra, Base, DiffPoly, DiffVar, Mode, Monomial};

/// One summand `coeff · multiplier · θ(f_generator)` of an ideal witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTerm {
    pub coeff: Coeff,
    pub multiplier: Monomial,
    pub theta: DerivOp,
    pub generator: usize,
}

impl From<&OracleTerm> for WitnessTerm {
    fn from(t: &OracleTerm) -> Self {
        WitnessTerm { coeff: t.coeff.clone(), multiplier: t.multiplier.clone(), theta: t.theta.clone(), generator: t.generator }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraSystem {
    alg: Algebra,
    x_bases: Vec<Base>,
    ideal: Vec<DiffPoly>,
}

impl SubalgebraSystem {
    /// `x_bases` are the variables of the ambient algebra besides `t`; the
    /// ideal generators must not involve `t`.
    pub fn new(alg: Algebra, x_bases: Vec<Base>, ideal: Vec<DiffPoly>) -> Result<Self> {
        if x_bases.contains(&Base::T) {
            return usage("t is the adjoined variable and cannot be an x-generator");
        }
        for (k, f) in ideal.iter().enumerate() {
            if f.algebra() != alg {
                return usage(format!("ideal generator {} lives in a different algebra", k + 1));
            }
            if let Some(b) = f.bases().into_iter().find(|b| !x_bases.contains(b)) {
                return invalid(format!("ideal generator {} uses {b}, which is not an x-variable", k + 1));
            }
        }
        Ok(SubalgebraSystem { alg, x_bases, ideal })
    }

    /// The system of an encoded machine: `x₁, x₂, q₀ … q_n` and the ideal
    /// generators of the encoding (including the quotient relations in the
    /// free presentation).
    pub fn from_encoded(sys: &EncodedSystem) -> Result<Self> {
        let mut bases = vec![Base::X1, Base::X2];
        bases.extend((0..=sys.machine().n()).map(Base::Q));
        SubalgebraSystem::new(sys.algebra(), bases, sys.ideal_generators())
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn ideal(&self) -> &[DiffPoly] {
        &self.ideal
    }

    pub fn x_bases(&self) -> &[Base] {
        &self.x_bases
    }

    fn t(&self) -> DiffPoly {
        DiffPoly::monomial(self.alg, Monomial::var(DiffVar::new(Base::T, DerivOp::identity(self.alg.derivations))))
    }

    /// Named generators of `S_I`: the `x`-variables, `dt1 … dtm`, `tf1 … tfr`.
    pub fn generators(&self) -> Vec<(String, DiffPoly)> {
        let mut out: Vec<(String, DiffPoly)> = self.t_generators();
        let t = self.t();
        for (k, f) in self.ideal.iter().enumerate() {
            out.push((format!("tf{}", k + 1), t.mul(f).expect("same algebra")));
        }
        out
    }

    /// Generators of the subalgebra `T`: the `x`-variables and `dt1 … dtm`.
    pub fn t_generators(&self) -> Vec<(String, DiffPoly)> {
        let m = self.alg.derivations;
        let mut out: Vec<(String, DiffPoly)> = self
            .x_bases
            .iter()
            .map(|b| (b.to_string(), DiffPoly::monomial(self.alg, Monomial::var(DiffVar::new(*b, DerivOp::identity(m))))))
            .collect();
        for k in 0..m {
            out.push((format!("dt{}", k + 1), DiffPoly::monomial(self.alg, Monomial::var(DiffVar::new(Base::T, DerivOp::delta(k, m))))));
        }
        out
    }

    pub fn generator(&self, name: &str) -> Result<DiffPoly> {
        let m = self.alg.derivations;
        if let Some(k) = name.strip_prefix("tf").and_then(|r| r.parse::<usize>().ok()) {
            if (1..=self.ideal.len()).contains(&k) {
                return Ok(self.t().mul(&self.ideal[k - 1])?);
            }
        }
        if let Some(k) = name.strip_prefix("dt").and_then(|r| r.parse::<usize>().ok()) {
            if (1..=m).contains(&k) {
                return Ok(DiffPoly::monomial(self.alg, Monomial::var(DiffVar::new(Base::T, DerivOp::delta(k - 1, m)))));
            }
        }
        if let Ok(b) = name.parse::<Base>() {
            if self.x_bases.contains(&b) {
                return Ok(DiffPoly::monomial(self.alg, Monomial::var(DiffVar::new(b, DerivOp::identity(m)))));
            }
        }
        invalid(format!("`{name}` is not a generator of the subalgebra"))
    }

    /// Expresses a polynomial in the `x`-variables over the `x`-generators.
    pub fn express_x_poly(&self, p: &DiffPoly) -> Result<SubExpr> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            terms.push(self.express_monomial(m)?.scaled(c.clone()));
        }
        Ok(SubExpr::sum(terms))
    }

    fn express_monomial(&self, m: &Monomial) -> Result<SubExpr> {
        if m.is_one() {
            return Ok(SubExpr::Const { value: self.alg.ring.one() });
        }
        let mut factors = Vec::new();
        for (v, e) in m.factors() {
            if !self.x_bases.contains(&v.base) {
                return invalid(format!("{v} is not a derivative of an x-generator"));
            }
            for _ in 0..*e {
                factors.push(SubExpr::gen(v.base.to_string(), &v.theta));
            }
        }
        Ok(SubExpr::product(factors))
    }

    /// `θ(t·f) = t·θ(f) + g` with `g` written over `T`'s generators:
    /// returns `(t·θ(f), g)`.
    pub fn theta_tf_decompose(&self, theta: &DerivOp, f: &DiffPoly) -> Result<(DiffPoly, SubExpr)> {
        if f.bases().contains(&Base::T) {
            return usage("f must not involve t");
        }
        let ring = self.alg.ring;
        let principal = self.t().mul(&f.apply_theta(theta))?;
        let mut terms = Vec::new();
        for rho in theta.divisors() {
            let Some(k) = rho.exps().iter().position(|e| !num_traits::Zero::is_zero(e)) else { continue };
            let rest = theta.checked_div(&rho).expect("divisor");
            let df = f.apply_theta(&rest);
            let c = ring.from_bigint(binomial(theta, &rho).into());
            if df.is_zero() || num_traits::Zero::is_zero(&c) {
                continue;
            }
            // ρ(t) = ρ'(δ_k t)
            let inner = rho.checked_div(&DerivOp::delta(k, self.alg.derivations)).expect("δ_k divides ρ");
            let leaf = SubExpr::gen(format!("dt{}", k + 1), &inner);
            terms.push(SubExpr::product(vec![leaf, self.express_x_poly(&df)?]).scaled(c));
        }
        Ok((principal, SubExpr::sum(terms)))
    }

    /// `Σ coeff · multiplier · θ(f_i)`.
    pub fn expand_witness(&self, witness: &[WitnessTerm]) -> Result<DiffPoly> {
        let mut acc = DiffPoly::zero(self.alg);
        for w in witness {
            let f = self.ideal.get(w.generator).ok_or_else(|| Error::Validation(format!("no ideal generator {}", w.generator + 1)))?;
            acc = acc.add(&f.apply_theta(&w.theta).mul_term(&w.coeff, &w.multiplier))?;
        }
        Ok(acc)
    }

    /// Rewrites `f = Σ λ·m·θ(f_i)` as an expression for `t·f` over the
    /// generators of `S_I`: `Σ λ·m·θ(t·f_i) − Σ λ·m·g_{θ,i}`.
    pub fn lift_to_subalgebra(&self, f: &DiffPoly, witness: &[WitnessTerm]) -> Result<SubExpr> {
        if self.expand_witness(witness)? != *f {
            return invalid("the witness does not expand to f");
        }
        let ring = self.alg.ring;
        let mut terms = Vec::new();
        for w in witness {
            let m = self.express_monomial(&w.multiplier)?;
            let unit_m = w.multiplier.is_one();
            let with_m = |e: SubExpr| if unit_m { e } else { SubExpr::product(vec![m.clone(), e]) };
            let name = format!("tf{}", w.generator + 1);
            terms.push(with_m(SubExpr::gen(name, &w.theta)).scaled(w.coeff.clone()));
            let (_, g) = self.theta_tf_decompose(&w.theta, &self.ideal[w.generator])?;
            if g != SubExpr::zero() {
                terms.push(with_m(g).scaled(ring.neg(&w.coeff)));
            }
        }
        Ok(SubExpr::sum(terms))
    }

    /// Accepts iff `expr` evaluates to `t·f` exactly.
    pub fn verify_lift(&self, expr: &SubExpr, f: &DiffPoly) -> Result<Verdict> {
        let value = match expr.evaluate(self) {
            Ok(v) => v,
            Err(e) => return Ok(Verdict::Reject { step: None, reason: e.to_string() }),
        };
        if value == self.t().mul(f)? {
            Ok(Verdict::Accept)
        } else {
            Ok(Verdict::Reject { step: None, reason: "expression does not evaluate to t·f".into() })
        }
    }

    /// Completes an oracle solution (found modulo the quotient relations) to
    /// an exact witness in this system's algebra. In the free presentation
    /// the leftover lies in the ideal of the relations and is written with
    /// the relation generators.
    pub fn witness_from_oracle(&self, f: &DiffPoly, terms: &[OracleTerm]) -> Result<Vec<WitnessTerm>> {
        let mut witness: Vec<WitnessTerm> = terms.iter().map(WitnessTerm::from).collect();
        let residual = f.sub(&self.expand_witness(&witness)?)?;
        if residual.is_zero() {
            return Ok(witness);
        }
        if self.alg.mode != Mode::Free {
            return invalid("oracle solution does not expand to f");
        }
        let m = self.alg.derivations;
        let relation = |base: Base, k: usize| {
            let v = DiffVar::new(base, DerivOp::delta(k, m));
            self.ideal.iter().position(|g| *g == DiffPoly::monomial(self.alg, Monomial::var(v.clone())))
        };
        let (rel_x2, rel_x1) = match (relation(Base::X2, 0), relation(Base::X1, 1)) {
            (Some(a), Some(b)) => (a, b),
            _ => return invalid("oracle solution needs the quotient relations, which are not ideal generators"),
        };
        for (mono, c) in residual.terms() {
            let hit = mono.factors().iter().find_map(|(v, _)| match v.base {
                Base::X1 if !num_traits::Zero::is_zero(v.theta.exp(1)) => Some((v, 1, rel_x1)),
                Base::X2 if !num_traits::Zero::is_zero(v.theta.exp(0)) => Some((v, 0, rel_x2)),
                _ => None,
            });
            let Some((v, k, generator)) = hit else {
                return invalid(format!("residual term {mono} is outside the quotient relations"));
            };
            let multiplier = mono.checked_div(&Monomial::var(v.clone())).expect("factor divides");
            let theta = v.theta.checked_div(&DerivOp::delta(k, m)).expect("positive exponent");
            witness.push(WitnessTerm { coeff: c.clone(), multiplier, theta, generator });
        }
        Ok(witness)
    }

    /// Bounded check of `t·f ∈ S_I` through the ideal oracle on `f`.
    pub fn refute_tf_membership_bounded(&self, f: &DiffPoly, bounds: OracleBounds) -> Result<TfMembership> {
        if f.bases().contains(&Base::T) {
            return usage("f must not involve t");
        }
        if f.is_zero() {
            return Ok(TfMembership::Member { expression: SubExpr::zero() });
        }
        let mut oracle = Oracle::new(&self.ideal, vec![None; self.ideal.len()], self.alg, bounds)?;
        Ok(match oracle.member(f)? {
            OracleOutcome::Member { terms } => {
                let witness = self.witness_from_oracle(f, &terms)?;
                let expression = self.lift_to_subalgebra(f, &witness)?;
                if !self.verify_lift(&expression, f)?.is_accept() {
                    return invalid("lifted expression failed verification");
                }
                TfMembership::Member { expression }
            }
            OracleOutcome::CertifiedNonMember { reason } => TfMembership::CertifiedNonMember { reason },
            OracleOutcome::NotMemberWithinBounds { bounds, products } => TfMembership::NotMemberWithinBounds { bounds, products },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TfMembership {
    /// `t·f ∈ S_I`, with a verified expression.
    Member { expression: SubExpr },
    CertifiedNonMember { reason: String },
    NotMemberWithinBounds { bounds: OracleBounds, products: usize },
}

/// Lift file: `f` and an expression claimed to evaluate to `t·f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftFile {
    pub f: String,
    pub expression: SubExpr,
}

impl LiftFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("lift file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn f_in(&self, alg: Algebra) -> Result<DiffPoly> {
        parse_in(alg, &self.f)
    }
}

/// One-line summary of the generator names, for reports.
pub fn describe(sys: &SubalgebraSystem) -> String {
    let mut s = String::new();
    for (k, (name, _)) in sys.generators().iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        write!(s, "{name}").unwrap();
    }
    s
}
