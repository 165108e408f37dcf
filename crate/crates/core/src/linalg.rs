//! Exact sparse elimination with combination tracking.
//!
//! Vectors are inserted one at a time into a [`Span`], which keeps a
//! semi-reduced echelon basis. Every stored row remembers which combination of
//! the inserted vectors produced it, so a vector that reduces to zero yields
//! an explicit dependence and a target that reduces to zero yields solution
//! coefficients.
//!
//! Over ℚ (and ℤ, where rank and dependence agree with ℚ) elimination is
//! fraction-free on integer rows with content removal; over GF(p) it runs on
//! machine residues.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::{Coeff, CoeffRing};

/// Sparse vector as `(column, value)` pairs; order and duplicates are
/// tolerated on input.
pub type SparseVec = Vec<(usize, Coeff)>;

/// Label used internally for the target of a solve.
const TARGET: usize = usize::MAX;

trait Domain {
    type E: Clone;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Converts a rational vector, returning the factor it was scaled by.
    fn import(&self, v: &[(usize, Coeff)]) -> (BTreeMap<usize, Self::E>, Self::E);
    fn export(&self, a: &Self::E) -> Coeff;
    /// Divides a row and its combination by a common unit or content.
    fn normalize(&self, row: &mut Row<Self::E>);
}

#[derive(Clone, Debug)]
struct Row<E> {
    vec: BTreeMap<usize, E>,
    comb: BTreeMap<usize, E>,
}

struct IntDomain;

impl Domain for IntDomain {
    type E = BigInt;

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn import(&self, v: &[(usize, Coeff)]) -> (BTreeMap<usize, BigInt>, BigInt) {
        let lcm = v.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (k, c) in v {
            *out.entry(*k).or_default() += c.numer() * (&lcm / c.denom());
        }
        out.retain(|_, c| !c.is_zero());
        (out, lcm)
    }

    fn export(&self, a: &BigInt) -> Coeff {
        Coeff::from_integer(a.clone())
    }

    fn normalize(&self, row: &mut Row<BigInt>) {
        let mut g = BigInt::zero();
        for c in row.vec.values().chain(row.comb.values()) {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let lead = row.vec.values().next().or_else(|| row.comb.values().next());
        if lead.is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        if g.is_zero() || g.is_one() {
            return;
        }
        for c in row.vec.values_mut().chain(row.comb.values_mut()) {
            *c /= &g;
        }
    }
}

struct ModDomain(u64);

impl ModDomain {
    fn inv(&self, a: u64) -> u64 {
        // Fermat: a^(p-2).
        let (mut base, mut exp, mut acc) = (a as u128, self.0 - 2, 1u128);
        let p = self.0 as u128;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u64
    }
}

impl Domain for ModDomain {
    type E = u64;

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.0 - b) % self.0
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }

    fn import(&self, v: &[(usize, Coeff)]) -> (BTreeMap<usize, u64>, u64) {
        let ring = CoeffRing::PrimeField(self.0);
        let mut out: BTreeMap<usize, u64> = BTreeMap::new();
        for (k, c) in v {
            let r = ring.coerce(c.clone()).expect("coefficient representable modulo p");
            let r = r.to_integer().to_u64().expect("residue fits u64");
            let e = out.entry(*k).or_insert(0);
            *e = (*e + r) % self.0;
        }
        out.retain(|_, c| *c != 0);
        (out, 1)
    }

    fn export(&self, a: &u64) -> Coeff {
        Coeff::from_integer(BigInt::from(*a))
    }

    fn normalize(&self, row: &mut Row<u64>) {
        let Some(&lead) = row.vec.values().next().or_else(|| row.comb.values().next()) else { return };
        if lead == 1 {
            return;
        }
        let inv = self.inv(lead);
        for c in row.vec.values_mut().chain(row.comb.values_mut()) {
            *c = self.mul(c, &inv);
        }
    }
}

struct Echelon<D: Domain> {
    dom: D,
    /// Pivot column → row whose smallest column is the pivot.
    rows: BTreeMap<usize, Row<D::E>>,
}

fn axpy<D: Domain>(dom: &D, dst: &mut BTreeMap<usize, D::E>, p: &D::E, a: &D::E, src: &BTreeMap<usize, D::E>) {
    // dst ← p·dst − a·src
    for v in dst.values_mut() {
        *v = dom.mul(v, p);
    }
    for (k, s) in src {
        let prod = dom.mul(a, s);
        match dst.get_mut(k) {
            Some(d) => {
                *d = dom.sub(d, &prod);
                if dom.is_zero(d) {
                    dst.remove(k);
                }
            }
            None if !dom.is_zero(&prod) => {
                dst.insert(*k, dom.neg(&prod));
            }
            None => {}
        }
    }
}

impl<D: Domain> Echelon<D> {
    fn new(dom: D) -> Self {
        Echelon { dom, rows: BTreeMap::new() }
    }

    /// Eliminates every pivot column from `row`.
    fn reduce(&self, row: &mut Row<D::E>) {
        let mut from = 0usize;
        loop {
            let next = row.vec.range(from..).map(|(k, _)| *k).find(|k| self.rows.contains_key(k));
            let Some(col) = next else { break };
            let pivot_row = &self.rows[&col];
            let p = pivot_row.vec[&col].clone();
            let a = row.vec[&col].clone();
            axpy(&self.dom, &mut row.vec, &p, &a, &pivot_row.vec);
            axpy(&self.dom, &mut row.comb, &p, &a, &pivot_row.comb);
            self.dom.normalize(row);
            from = col + 1;
        }
    }

    fn row_for(&self, v: &[(usize, Coeff)], label: usize) -> Row<D::E> {
        let (vec, scale) = self.dom.import(v);
        let mut comb = BTreeMap::new();
        comb.insert(label, scale);
        Row { vec, comb }
    }
}

enum Inner {
    Int(Echelon<IntDomain>),
    Mod(Echelon<ModDomain>),
}

/// An incrementally built span of labelled vectors.
pub struct Span {
    ring: CoeffRing,
    inner: Inner,
    inserted: usize,
}

/// Outcome of inserting a vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insert {
    /// The vector was independent of the earlier ones and is now a basis row.
    Independent,
    /// A non-trivial vanishing combination `Σ c_k v_k = 0` over the inserted
    /// vectors (by insertion index), including the new one.
    Dependent(SparseVec),
}

impl Span {
    /// Over the integers, rank and dependence are computed over ℚ.
    pub fn new(ring: CoeffRing) -> Self {
        let inner = match ring {
            CoeffRing::PrimeField(p) => Inner::Mod(Echelon::new(ModDomain(p))),
            _ => Inner::Int(Echelon::new(IntDomain)),
        };
        Span { ring, inner, inserted: 0 }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        match &self.inner {
            Inner::Int(e) => e.rows.len(),
            Inner::Mod(e) => e.rows.len(),
        }
    }

    /// Number of vectors inserted so far (independent or not).
    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    pub fn insert(&mut self, v: &[(usize, Coeff)]) -> Insert {
        let label = self.inserted;
        self.inserted += 1;
        fn go<D: Domain>(e: &mut Echelon<D>, v: &[(usize, Coeff)], label: usize) -> Insert {
            let mut row = e.row_for(v, label);
            e.reduce(&mut row);
            match row.vec.keys().next() {
                Some(&pivot) => {
                    e.rows.insert(pivot, row);
                    Insert::Independent
                }
                None => Insert::Dependent(row.comb.iter().map(|(k, c)| (*k, e.dom.export(c))).collect()),
            }
        }
        match &mut self.inner {
            Inner::Int(e) => go(e, v, label),
            Inner::Mod(e) => go(e, v, label),
        }
    }

    /// Coefficients `λ` (by insertion index) with `Σ λ_k v_k = target`, if the
    /// target lies in the span.
    pub fn solve(&self, target: &[(usize, Coeff)]) -> Option<SparseVec> {
        fn go<D: Domain>(e: &Echelon<D>, target: &[(usize, Coeff)]) -> Option<(Coeff, Vec<(usize, Coeff)>)> {
            let mut row = e.row_for(target, TARGET);
            e.reduce(&mut row);
            if !row.vec.is_empty() {
                return None;
            }
            let s = e.dom.export(&row.comb[&TARGET]);
            Some((s, row.comb.iter().filter(|(k, _)| **k != TARGET).map(|(k, c)| (*k, e.dom.export(c))).collect()))
        }
        let (s, comb) = match &self.inner {
            Inner::Int(e) => go(e, target)?,
            Inner::Mod(e) => go(e, target)?,
        };
        // s·target + Σ comb_k v_k = 0
        let ring = match self.ring {
            CoeffRing::Integers => CoeffRing::Rationals,
            r => r,
        };
        let inv = ring.inv(&s).expect("target label survives elimination");
        let out = comb.into_iter().map(|(k, c)| (k, ring.neg(&ring.mul(&c, &inv)))).filter(|(_, c)| !c.is_zero()).collect();
        Some(out)
    }
}

/// Evaluates `Σ λ_k v_k` densely keyed by column (for checking results).
pub fn combine(ring: CoeffRing, vectors: &[SparseVec], lambda: &[(usize, Coeff)]) -> BTreeMap<usize, Coeff> {
    let mut out: BTreeMap<usize, Coeff> = BTreeMap::new();
    for (k, l) in lambda {
        for (col, c) in &vectors[*k] {
            let e = out.entry(*col).or_insert_with(Coeff::zero);
            *e = ring.add(e, &ring.mul(l, c));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Coeff {
        Coeff::from_integer(n.into())
    }

    fn frac(n: i64, d: i64) -> Coeff {
        Coeff::new(n.into(), d.into())
    }

    #[test]
    fn rank_and_dependence() {
        let mut s = Span::new(CoeffRing::Rationals);
        assert_eq!(s.insert(&[(0, q(1)), (1, q(2))]), Insert::Independent);
        assert_eq!(s.insert(&[(1, q(1)), (2, q(1))]), Insert::Independent);
        // v2 = v0 − 2 v1
        let dep = s.insert(&[(0, q(1)), (2, q(-2))]);
        let Insert::Dependent(c) = dep else { panic!() };
        let vs = vec![vec![(0, q(1)), (1, q(2))], vec![(1, q(1)), (2, q(1))], vec![(0, q(1)), (2, q(-2))]];
        assert!(combine(CoeffRing::Rationals, &vs, &c).is_empty());
        assert_eq!(c.len(), 3);
        assert_eq!(s.rank(), 2);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn solve_with_fractions() {
        let mut s = Span::new(CoeffRing::Rationals);
        let vs = vec![vec![(0, q(2)), (1, q(1))], vec![(1, q(3))]];
        for v in &vs {
            s.insert(v);
        }
        let target = vec![(0, q(1)), (1, frac(5, 2))];
        let lam = s.solve(&target).unwrap();
        assert_eq!(lam, vec![(0, frac(1, 2)), (1, q(2) / q(3))]);
        assert!(s.solve(&[(2, q(1))]).is_none());
        assert_eq!(s.solve(&[]).unwrap(), vec![]);
    }

    #[test]
    fn characteristic_matters() {
        // (1,1), (1,-1) are independent over ℚ, equal over GF(2).
        let a = vec![(0, q(1)), (1, q(1))];
        let b = vec![(0, q(1)), (1, q(-1))];
        let mut s = Span::new(CoeffRing::Rationals);
        s.insert(&a);
        assert_eq!(s.insert(&b), Insert::Independent);
        let mut s = Span::new(CoeffRing::gf2());
        s.insert(&a);
        assert_eq!(s.insert(&b), Insert::Dependent(vec![(0, q(1)), (1, q(1))]));
        let mut s = Span::new(CoeffRing::PrimeField(7));
        s.insert(&[(0, q(3))]);
        assert_eq!(s.solve(&[(0, q(1))]).unwrap(), vec![(0, q(5))]);
    }

    fn arb_vec(cols: usize) -> impl Strategy<Value = SparseVec> {
        prop::collection::vec((0..cols, -3i64..=3), 0..5).prop_map(|v| v.into_iter().map(|(k, c)| (k, q(c))).collect())
    }

    proptest! {
        #[test]
        fn solutions_and_relations_are_exact(vs in prop::collection::vec(arb_vec(6), 1..10), pick in prop::collection::vec(-2i64..=2, 10), p in prop::sample::select(vec![0u64, 2, 3, 101])) {
            let ring = if p == 0 { CoeffRing::Rationals } else { CoeffRing::PrimeField(p) };
            let vs: Vec<SparseVec> = vs.into_iter().map(|v| v.into_iter().map(|(k, c)| (k, ring.coerce(c).unwrap())).collect()).collect();
            let mut s = Span::new(ring);
            let mut deps = 0;
            for v in &vs {
                if let Insert::Dependent(c) = s.insert(v) {
                    deps += 1;
                    prop_assert!(!c.is_empty());
                    prop_assert!(combine(ring, &vs, &c).is_empty());
                }
            }
            prop_assert_eq!(s.rank() + deps, vs.len());
            let lam: Vec<(usize, Coeff)> = pick.iter().take(vs.len()).enumerate().map(|(k, c)| (k, ring.from_i64(*c))).collect();
            let target: SparseVec = combine(ring, &vs, &lam).into_iter().collect();
            let sol = s.solve(&target).expect("target built from the span");
            prop_assert_eq!(combine(ring, &vs, &sol), target.into_iter().collect::<BTreeMap<_, _>>());
        }
    }
}
