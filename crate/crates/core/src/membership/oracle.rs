//! Degree-bounded membership oracle.
//!
//! Every generator of a machine system is homogeneous in each variable group
//! (`x₁`-, `x₂`-, `q`- and `t`-variables with all their derivatives), and so
//! is every product `m · θ(g)` with `m` a monomial. A homogeneous target is
//! therefore in the ideal iff it is a combination of such products landing in
//! its own multidegree component. The oracle enumerates those products within
//! order bounds and solves the resulting exact linear system.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use num_traits::Zero;
use serde::Serialize;

use crate::coeff::Coeff;
use crate::deriv::DerivOp;
use crate::encoder::EncodedSystem;
use crate::envop::{VOperator, WOperator};
use crate::error::{usage, Error, Result};
use crate::linalg::{Span, SparseVec};
use crate::minsky::Command;
use crate::poly::{Algebra, Base, DiffPoly, DiffVar, GradeKey, Grading, GroupDegrees, Monomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OracleBounds {
    /// Largest exponent of each basic derivation in `θ`, and of each
    /// derivation on multiplier `q`/`t` variables.
    pub max_order: u32,
    /// Largest derivative order on multiplier `x₁`/`x₂` variables.
    pub max_xdeg: u32,
    /// Search all multipliers of the right total degree instead of only the
    /// ones matching every group degree.
    pub strict: bool,
    /// Upper limit on enumerated products.
    pub cap: usize,
    /// Worker threads for product assembly (1 = current thread). Not part
    /// of reported results, which do not depend on it.
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { max_order: 8, max_xdeg: 2, strict: false, cap: 400_000, jobs: 1 }
    }
}

/// One product `coeff · multiplier · θ(generator)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleTerm {
    #[serde(with = "crate::coeff::coeff_text")]
    pub coeff: Coeff,
    pub generator: usize,
    #[serde(serialize_with = "display")]
    pub multiplier: Monomial,
    pub theta: DerivOp,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl OracleTerm {
    /// The operator as a `V_{εσ}` element, if its multiplier has that shape.
    pub fn as_v(&self, eps: u8, sigma: u8) -> Option<VOperator> {
        let mut a = None;
        let mut b = None;
        for (v, e) in self.multiplier.factors() {
            if *e != 1 {
                return None;
            }
            match v.base {
                Base::X1 if a.is_none() && v.theta.exp(1).is_zero() => a = Some(to_u32(v.theta.exp(0))?),
                Base::X2 if b.is_none() && v.theta.exp(0).is_zero() => b = Some(to_u32(v.theta.exp(1))?),
                _ => return None,
            }
        }
        if a.is_some() != (eps == 0) || b.is_some() != (sigma == 0) {
            return None;
        }
        let (s, t) = (to_u32(self.theta.exp(0))?, to_u32(self.theta.exp(1))?);
        VOperator::new(eps, sigma, a.unwrap_or(0), b.unwrap_or(0), s, t).ok()
    }

    pub fn as_w(&self, eps: u8, sigma: u8) -> Option<WOperator> {
        self.as_v(eps, sigma)?.as_w()
    }
}

fn to_u32(v: &num_bigint::BigUint) -> Option<u32> {
    num_traits::ToPrimitive::to_u32(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleOutcome {
    Member { terms: Vec<OracleTerm> },
    /// Non-membership that holds at every bound.
    CertifiedNonMember { reason: String },
    /// No combination exists among the enumerated products.
    NotMemberWithinBounds { bounds: OracleBounds, products: usize },
}

impl OracleOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, OracleOutcome::Member { .. })
    }
}

/// Products `m · θ(g)` of one multidegree component, eliminated once and
/// reused for every target in that component.
struct Component {
    labels: Vec<(usize, Monomial, DerivOp)>,
    columns: HashMap<Monomial, usize>,
    span: Span,
}

/// An oracle session over fixed generators; components are cached.
pub struct Oracle {
    alg: Algebra,
    gens: Vec<DiffPoly>,
    degrees: Vec<Option<GroupDegrees>>,
    bases: Vec<BTreeSet<Base>>,
    commands: Vec<Option<Command>>,
    bounds: OracleBounds,
    cache: HashMap<(GroupDegrees, BTreeSet<Base>), Component>,
}

impl Oracle {
    /// Works over a field; free-algebra generators are mapped to the quotient
    /// presentation (membership modulo the quotient relations is decided
    /// there).
    pub fn new(gens: &[DiffPoly], commands: Vec<Option<Command>>, alg: Algebra, bounds: OracleBounds) -> Result<Self> {
        if !alg.ring.is_field() {
            return usage("the membership oracle needs a coefficient field (Q or GF(p))");
        }
        if alg.derivations != 2 {
            return usage("the membership oracle works with two derivations");
        }
        let qalg = Algebra::quotient(alg.ring);
        let mut projected = Vec::with_capacity(gens.len());
        for g in gens {
            if g.algebra() != alg {
                return usage("generators live in different algebras");
            }
            projected.push(g.quotient_image()?);
        }
        let degrees: Vec<Option<GroupDegrees>> = projected.iter().map(|g| if g.is_zero() { None } else { g.group_degrees() }).collect();
        if let Some(k) = projected.iter().zip(&degrees).position(|(g, d)| !g.is_zero() && d.is_none()) {
            return usage(format!("generator {k} is not homogeneous in each variable group"));
        }
        let bases = projected.iter().map(DiffPoly::bases).collect();
        Ok(Oracle { alg: qalg, gens: projected, degrees, bases, commands, bounds, cache: HashMap::new() })
    }

    pub fn for_system(sys: &EncodedSystem, bounds: OracleBounds) -> Result<Self> {
        let gens = sys.ideal_generators();
        let mut commands: Vec<Option<Command>> = sys.generators().iter().map(|(c, _)| Some(*c)).collect();
        commands.resize(gens.len(), None);
        Oracle::new(&gens, commands, sys.algebra(), bounds)
    }

    pub fn bounds(&self) -> OracleBounds {
        self.bounds
    }

    /// Generators as used internally (in the quotient presentation).
    pub fn generators(&self) -> &[DiffPoly] {
        &self.gens
    }

    pub fn command(&self, generator: usize) -> Option<Command> {
        self.commands.get(generator).copied().flatten()
    }

    /// Decides membership of `target` within the bounds, one group-degree
    /// component at a time.
    pub fn member(&mut self, target: &DiffPoly) -> Result<OracleOutcome> {
        if target.ring() != self.alg.ring || target.algebra().derivations != 2 {
            return usage("target and generators live in different algebras");
        }
        let target = target.quotient_image()?;
        let mut terms = Vec::new();
        let mut within_bounds = None;
        for (key, comp) in target.components(Grading::BaseGroups) {
            let GradeKey::Groups(d) = key else { unreachable!() };
            match self.member_component(&comp, d)? {
                OracleOutcome::Member { terms: t } => terms.extend(t),
                certified @ OracleOutcome::CertifiedNonMember { .. } => return Ok(certified),
                other => within_bounds = within_bounds.or(Some(other)),
            }
        }
        Ok(within_bounds.unwrap_or(OracleOutcome::Member { terms }))
    }

    fn candidates(&self, d: &GroupDegrees) -> Vec<usize> {
        (0..self.gens.len())
            .filter(|&k| match &self.degrees[k] {
                Some(gd) if self.bounds.strict => total(gd) <= total(d),
                Some(gd) => gd.iter().zip(d).all(|(a, b)| a <= b),
                None => false,
            })
            .collect()
    }

    /// A reason the component cannot be reached at any bound, if one of the
    /// grading arguments applies.
    fn obstruction(&self, target: &DiffPoly, d: &GroupDegrees) -> Option<String> {
        let exact: Vec<usize> = (0..self.gens.len())
            .filter(|&k| self.degrees[k].is_some_and(|gd| gd.iter().zip(d).all(|(a, b)| a <= b)))
            .collect();
        if exact.is_empty() {
            return Some(format!("no generator fits the variable-group degrees {d:?}"));
        }
        for base in target.bases() {
            let slot = group_slot(base);
            let reachable = exact.iter().any(|&k| self.bases[k].contains(&base) || self.degrees[k].unwrap()[slot] < d[slot]);
            if !reachable {
                return Some(format!("grading obstruction: {base} absent"));
            }
        }
        None
    }

    fn member_component(&mut self, target: &DiffPoly, d: GroupDegrees) -> Result<OracleOutcome> {
        if let Some(reason) = self.obstruction(target, &d) {
            return Ok(OracleOutcome::CertifiedNonMember { reason });
        }
        let pool = self.pool(target);
        if self.bounds.strict {
            return self.solve_strict(target, d, &pool);
        }
        let key = (d, pool.clone());
        if !self.cache.contains_key(&key) {
            let labels = self.enumerate(&d, &pool)?;
            let rows = self.assemble(&labels)?;
            let mut columns: HashMap<Monomial, usize> = HashMap::new();
            let mut span = Span::new(self.alg.ring);
            for row in &rows {
                span.insert(&index_poly(row, &mut columns));
            }
            self.cache.insert(key.clone(), Component { labels, columns, span });
        }
        let comp = &self.cache[&key];
        let mut vec = Vec::with_capacity(target.len());
        for (m, c) in target.terms() {
            match comp.columns.get(m) {
                Some(&col) => vec.push((col, c.clone())),
                None => return Ok(self.not_within(comp.labels.len())),
            }
        }
        Ok(match comp.span.solve(&vec) {
            Some(lambda) => OracleOutcome::Member { terms: to_terms(&comp.labels, lambda) },
            None => self.not_within(comp.labels.len()),
        })
    }

    fn not_within(&self, products: usize) -> OracleOutcome {
        OracleOutcome::NotMemberWithinBounds { bounds: self.bounds, products }
    }

    /// `q`/`t` bases a multiplier may use: those of the target and the
    /// generators. Any other base has degree zero in every generator and in
    /// the target, so it cannot help.
    fn pool(&self, target: &DiffPoly) -> BTreeSet<Base> {
        self.bases.iter().flatten().copied().chain(target.bases()).filter(|b| !b.is_x()).collect()
    }

    fn group_vars(&self, pool: &BTreeSet<Base>) -> [Vec<DiffVar>; 4] {
        let (o, x) = (self.bounds.max_order, self.bounds.max_xdeg);
        let x1 = (0..=x).map(|a| DiffVar::d2(Base::X1, a, 0u32)).collect();
        let x2 = (0..=x).map(|b| DiffVar::d2(Base::X2, 0u32, b)).collect();
        let orders = |base: Base| (0..=o).flat_map(move |i| (0..=o).map(move |j| DiffVar::d2(base, i, j)));
        let qs = pool.iter().filter(|b| matches!(b, Base::Q(_))).flat_map(|b| orders(*b)).collect();
        let ts = pool.iter().filter(|b| **b == Base::T).flat_map(|b| orders(*b)).collect();
        [x1, x2, qs, ts]
    }

    /// Labels `(generator, multiplier, θ)` of every product in component `d`.
    fn enumerate(&self, d: &GroupDegrees, pool: &BTreeSet<Base>) -> Result<Vec<(usize, Monomial, DerivOp)>> {
        let vars = self.group_vars(pool);
        let mut plan: Vec<(usize, GroupDegrees)> = Vec::new();
        for k in self.candidates(d) {
            let gd = self.degrees[k].unwrap();
            if self.bounds.strict {
                for split in compositions(total(d) - total(&gd)) {
                    plan.push((k, split));
                }
            } else {
                plan.push((k, [d[0] - gd[0], d[1] - gd[1], d[2] - gd[2], d[3] - gd[3]]));
            }
        }
        let thetas = u128::from(self.bounds.max_order + 1).pow(2);
        let count: u128 = plan.iter().map(|(_, split)| multiplier_count(&vars, split).saturating_mul(thetas)).sum();
        if count > self.bounds.cap as u128 {
            return Err(Error::Resource(format!(
                "{count} products exceed the oracle cap {} (max_order {}, max_xdeg {})",
                self.bounds.cap, self.bounds.max_order, self.bounds.max_xdeg
            )));
        }
        let mut labels = Vec::with_capacity(count as usize);
        for (k, split) in plan {
            let multipliers = multipliers(&vars, &split);
            for s in 0..=self.bounds.max_order {
                for t in 0..=self.bounds.max_order {
                    for m in &multipliers {
                        labels.push((k, m.clone(), DerivOp::d2(s, t)));
                    }
                }
            }
        }
        Ok(labels)
    }

    fn assemble(&self, labels: &[(usize, Monomial, DerivOp)]) -> Result<Vec<DiffPoly>> {
        // θ(g) is shared by all multipliers; compute each once.
        let mut keys: Vec<(usize, DerivOp)> = labels.iter().map(|(k, _, th)| (*k, th.clone())).collect();
        keys.dedup();
        let derive = |(k, th): &(usize, DerivOp)| ((*k, th.clone()), self.gens[*k].apply_theta(th));
        let derived: HashMap<(usize, DerivOp), DiffPoly> = self.parallel(|| keys.par_iter().map(derive).collect(), || keys.iter().map(derive).collect())?;
        let ring = self.alg.ring;
        let one = ring.one();
        let product = |(k, m, th): &(usize, Monomial, DerivOp)| derived[&(*k, th.clone())].mul_term(&one, m);
        self.parallel(|| labels.par_iter().map(product).collect(), || labels.iter().map(product).collect())
    }

    fn parallel<T: Send>(&self, par: impl FnOnce() -> T + Send, seq: impl FnOnce() -> T) -> Result<T> {
        if self.bounds.jobs <= 1 {
            return Ok(seq());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.bounds.jobs)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
        Ok(pool.install(par))
    }

    /// Strict search: products of any group split, pruned of rows holding a
    /// monomial nothing else can cancel, solved without caching.
    fn solve_strict(&self, target: &DiffPoly, d: GroupDegrees, pool: &BTreeSet<Base>) -> Result<OracleOutcome> {
        let labels = self.enumerate(&d, pool)?;
        let rows = self.assemble(&labels)?;
        let mut columns: HashMap<Monomial, usize> = HashMap::new();
        let target_vec = index_poly(target, &mut columns);
        let vecs: Vec<SparseVec> = rows.iter().map(|r| index_poly(r, &mut columns)).collect();
        let target_cols: BTreeSet<usize> = target_vec.iter().map(|(c, _)| *c).collect();
        let keep = prune(&vecs, &target_cols, columns.len());
        let mut span = Span::new(self.alg.ring);
        let kept: Vec<usize> = (0..vecs.len()).filter(|&r| keep[r]).collect();
        for &r in &kept {
            span.insert(&vecs[r]);
        }
        Ok(match span.solve(&target_vec) {
            Some(lambda) => {
                let relabelled: Vec<(usize, Coeff)> = lambda.into_iter().map(|(i, c)| (kept[i], c)).collect();
                OracleOutcome::Member { terms: to_terms(&labels, relabelled) }
            }
            None => self.not_within(labels.len()),
        })
    }

    /// `Σ coeff · multiplier · θ(generator)` over the oracle's generators.
    pub fn evaluate(&self, terms: &[OracleTerm]) -> DiffPoly {
        let mut out = DiffPoly::zero(self.alg);
        for t in terms {
            out = out.add(&self.gens[t.generator].apply_theta(&t.theta).mul_term(&t.coeff, &t.multiplier)).expect("same algebra");
        }
        out
    }

    /// Whether every term uses a `W_{εσ}` operator for its generator's command.
    pub fn all_in_w(&self, terms: &[OracleTerm]) -> bool {
        terms.iter().all(|t| self.command(t.generator).is_some_and(|c| t.as_w(c.eps, c.sigma).is_some()))
    }
}

fn to_terms(labels: &[(usize, Monomial, DerivOp)], lambda: Vec<(usize, Coeff)>) -> Vec<OracleTerm> {
    lambda
        .into_iter()
        .map(|(r, coeff)| {
            let (generator, multiplier, theta) = labels[r].clone();
            OracleTerm { coeff, generator, multiplier, theta }
        })
        .collect()
}

fn index_poly(p: &DiffPoly, columns: &mut HashMap<Monomial, usize>) -> SparseVec {
    p.terms()
        .map(|(m, c)| {
            let next = columns.len();
            (*columns.entry(m.clone()).or_insert(next), c.clone())
        })
        .collect()
}

/// Repeatedly drops rows with a column used by no other live row and absent
/// from the target: such a row must get coefficient zero.
fn prune(vecs: &[SparseVec], target: &BTreeSet<usize>, ncols: usize) -> Vec<bool> {
    let mut keep = vec![true; vecs.len()];
    let mut uses = vec![0usize; ncols];
    let mut by_col: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (r, v) in vecs.iter().enumerate() {
        for (c, _) in v {
            uses[*c] += 1;
            by_col[*c].push(r);
        }
    }
    let mut queue: Vec<usize> = (0..ncols).filter(|c| uses[*c] == 1 && !target.contains(c)).collect();
    while let Some(c) = queue.pop() {
        if uses[c] != 1 {
            continue;
        }
        let Some(&r) = by_col[c].iter().find(|&&r| keep[r]) else { continue };
        keep[r] = false;
        for (c2, _) in &vecs[r] {
            uses[*c2] -= 1;
            if uses[*c2] == 1 && !target.contains(c2) {
                queue.push(*c2);
            }
        }
    }
    for (r, v) in vecs.iter().enumerate() {
        if v.is_empty() {
            keep[r] = false;
        }
    }
    keep
}

fn group_slot(b: Base) -> usize {
    match b {
        Base::X1 => 0,
        Base::X2 => 1,
        Base::Q(_) => 2,
        Base::T => 3,
    }
}

fn total(d: &GroupDegrees) -> u64 {
    d.iter().sum()
}

/// All `[a,b,c,e]` with the given sum.
fn compositions(n: u64) -> Vec<GroupDegrees> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                out.push([a, b, c, n - a - b - c]);
            }
        }
    }
    out
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn multiplier_count(vars: &[Vec<DiffVar>; 4], split: &GroupDegrees) -> u128 {
    vars.iter().zip(split).fold(1u128, |acc, (vs, &d)| {
        let n = vs.len() as u128;
        let c = if d == 0 { 1 } else if n == 0 { 0 } else { binomial_u128(n + d as u128 - 1, d as u128) };
        acc.saturating_mul(c)
    })
}

/// Monomials with the given degree in each group.
fn multipliers(vars: &[Vec<DiffVar>; 4], split: &GroupDegrees) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for (vs, &d) in vars.iter().zip(split) {
        let choices = multisets(vs.len(), d as usize);
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for m in &out {
            for pick in &choices {
                let part = Monomial::from_factors(pick.iter().map(|&i| (vs[i].clone(), 1)));
                next.push(m.mul(&part));
            }
        }
        out = next;
    }
    out
}

/// Non-decreasing index sequences of length `d` over `0..n`.
fn multisets(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, d: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            go(n, d, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, d, 0, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Convenience wrapper: one-off oracle call on a machine system.
pub fn oracle_member(sys: &EncodedSystem, target: &DiffPoly, bounds: OracleBounds) -> Result<OracleOutcome> {
    Oracle::for_system(sys, bounds)?.member(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffRing;
    use crate::encoder::{config_difference, config_element};
    use crate::minsky::{library, Config, Machine};
    use num_traits::One;

    fn qa() -> Algebra {
        Algebra::quotient(CoeffRing::Rationals)
    }

    fn small() -> OracleBounds {
        OracleBounds { max_order: 4, max_xdeg: 1, ..OracleBounds::default() }
    }

    #[test]
    fn generator_is_member_with_unit_coefficient() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let mut oracle = Oracle::for_system(&sys, small()).unwrap();
        for (k, (_, g)) in sys.generators().iter().enumerate() {
            let OracleOutcome::Member { terms } = oracle.member(g).unwrap() else { panic!() };
            assert_eq!(terms.len(), 1);
            assert_eq!(terms[0].generator, k);
            assert!(terms[0].coeff.is_one());
            assert!(terms[0].multiplier.is_one() && terms[0].theta.is_identity());
        }
    }

    #[test]
    fn single_machine_target() {
        let sys = EncodedSystem::compile(&library::single(), qa()).unwrap();
        let target = DiffPoly::parse(qa(), "x1 * x2 * q1 - x1 * x2 * q0").unwrap();
        assert!(oracle_member(&sys, &target, small()).unwrap().is_member());
    }

    #[test]
    fn halting_runs_are_found_in_w() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let mut oracle = Oracle::for_system(&sys, small()).unwrap();
        for k in 0..=5u32 {
            let target = config_difference(qa(), &Config::new(1, k, 0u32), &Config::new(0, 0u32, 0u32));
            let OracleOutcome::Member { terms } = oracle.member(&target).unwrap() else { panic!("k = {k}") };
            assert_eq!(terms.len(), k as usize + 1);
            assert!(oracle.all_in_w(&terms));
            assert_eq!(oracle.evaluate(&terms), target);
        }
        // Beyond the order bound the run is out of reach.
        let far = config_difference(qa(), &Config::new(1, 9u32, 0u32), &Config::new(0, 0u32, 0u32));
        assert!(matches!(oracle.member(&far).unwrap(), OracleOutcome::NotMemberWithinBounds { .. }));
    }

    #[test]
    fn absent_base_is_certified() {
        let sys = EncodedSystem::compile(&library::inc_forever(), qa()).unwrap();
        let target = config_difference(qa(), &Config::new(1, 0u32, 0u32), &Config::new(0, 1u32, 0u32));
        assert_eq!(
            oracle_member(&sys, &target, small()).unwrap(),
            OracleOutcome::CertifiedNonMember { reason: "grading obstruction: q0 absent".into() }
        );
        let lone = config_element(qa(), &Config::new(1, 0u32, 0u32));
        assert!(matches!(oracle_member(&sys, &lone, small()).unwrap(), OracleOutcome::NotMemberWithinBounds { .. }));
        let sys = EncodedSystem::compile(&Machine::new(1, []).unwrap(), qa()).unwrap();
        assert!(matches!(oracle_member(&sys, &lone, small()).unwrap(), OracleOutcome::CertifiedNonMember { .. }));
    }

    #[test]
    fn free_presentation_and_inhomogeneous_targets() {
        let alg = Algebra::free(CoeffRing::Rationals);
        let sys = EncodedSystem::compile(&library::single(), alg).unwrap();
        let base = DiffPoly::parse(alg, "x1 * x2 * q1 - x1 * x2 * q0").unwrap();
        // Adding a multiple of a quotient relation keeps membership.
        let target = base.add(&DiffPoly::parse(alg, "x1[0,1] * q0").unwrap()).unwrap();
        assert!(oracle_member(&sys, &target, small()).unwrap().is_member());
        // Sum of two different group components: both must be members.
        let qs = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let mixed = qs.generators()[0].1.add(&qs.generators()[1].1).unwrap();
        assert!(oracle_member(&qs, &mixed, small()).unwrap().is_member());
        assert!(oracle_member(&qs, &DiffPoly::zero(qa()), small()).unwrap().is_member());
    }

    #[test]
    fn strict_mode_agrees() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let strict = OracleBounds { max_order: 2, max_xdeg: 1, strict: true, ..OracleBounds::default() };
        let loose = OracleBounds { strict: false, ..strict };
        for k in 0..=3u32 {
            for halt in [Config::new(0, 0u32, 0u32), Config::new(0, 1u32, 0u32)] {
                let target = config_difference(qa(), &Config::new(1, k, 0u32), &halt);
                let a = oracle_member(&sys, &target, strict).unwrap();
                let b = oracle_member(&sys, &target, loose).unwrap();
                assert_eq!(a.is_member(), b.is_member(), "k = {k}");
            }
        }
        let tiny = OracleBounds { cap: 10, ..strict };
        let target = config_difference(qa(), &Config::new(1, 1u32, 0u32), &Config::new(0, 0u32, 0u32));
        assert!(matches!(oracle_member(&sys, &target, tiny), Err(Error::Resource(_))));
    }

    #[test]
    fn integers_rejected() {
        let sys = EncodedSystem::compile(&library::dec1(), Algebra::quotient(CoeffRing::Integers)).unwrap();
        assert!(matches!(Oracle::for_system(&sys, small()), Err(Error::Usage(_))));
    }

    #[test]
    fn parallel_assembly_is_deterministic() {
        let sys = EncodedSystem::compile(&library::transfer(), qa()).unwrap();
        let target = config_difference(qa(), &Config::new(1, 2u32, 0u32), &Config::new(0, 1u32, 0u32));
        let seq = oracle_member(&sys, &target, small()).unwrap();
        let par = oracle_member(&sys, &target, OracleBounds { jobs: 4, ..small() }).unwrap();
        assert!(seq.is_member());
        assert_eq!(seq, par);
    }
}
