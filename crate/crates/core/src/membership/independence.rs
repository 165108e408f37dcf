//! Linear independence of the highest parts `highest_part(v · g)` over the
//! bounded `V_{εσ}` operators.

use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::Coeff;
use crate::encoder::EncodedSystem;
use crate::envop::VOperator;
use crate::error::Result;
use crate::linalg::{Insert, Span};
use crate::minsky::Command;
use crate::poly::{Algebra, DiffPoly, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Element {
    pub command: Command,
    pub v: VOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub bound: u32,
    pub elements: usize,
    pub rank: usize,
    /// The first vanishing combination met, if any.
    pub dependence: Option<Vec<(String, Element)>>,
}

impl IndependenceReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.elements
    }
}

/// All of `V_{εσ}` with every exponent at most `bound`, in a fixed order.
pub fn v_operators(eps: u8, sigma: u8, bound: u32) -> Vec<VOperator> {
    let a_max = if eps == 0 { bound } else { 0 };
    let b_max = if sigma == 0 { bound } else { 0 };
    let mut out = Vec::new();
    for s in 0..=bound {
        for t in 0..=bound {
            for a in 0..=a_max {
                for b in 0..=b_max {
                    out.push(VOperator { eps, sigma, a, b, s, t });
                }
            }
        }
    }
    out
}

/// The elements in checking order together with their highest parts (zero
/// when `v · g` vanishes).
pub fn highest_parts(sys: &EncodedSystem, bound: u32) -> Result<Vec<(Element, DiffPoly)>> {
    let alg = Algebra::quotient(sys.algebra().ring);
    let mut jobs = Vec::new();
    for (c, g) in sys.generators() {
        let g = g.quotient_image()?;
        for v in v_operators(c.eps, c.sigma, bound) {
            jobs.push((Element { command: *c, v }, g.clone()));
        }
    }
    jobs.into_par_iter()
        .map(|(e, g)| {
            let applied = e.v.to_operator(alg)?.apply(&g)?;
            let top = if applied.is_zero() { applied } else { applied.highest_part()? };
            Ok((e, top))
        })
        .collect()
}

pub fn independence_check(sys: &EncodedSystem, bound: u32) -> Result<IndependenceReport> {
    let parts = highest_parts(sys, bound)?;
    let mut columns: std::collections::HashMap<Monomial, usize> = std::collections::HashMap::new();
    let mut span = Span::new(sys.algebra().ring);
    let mut dependence = None;
    for (_, p) in &parts {
        let vec: Vec<(usize, Coeff)> = p
            .terms()
            .map(|(m, c)| {
                let next = columns.len();
                (*columns.entry(m.clone()).or_insert(next), c.clone())
            })
            .collect();
        if let Insert::Dependent(comb) = span.insert(&vec) {
            dependence.get_or_insert_with(|| comb.into_iter().map(|(k, c)| (c.to_string(), parts[k].0.clone())).collect());
        }
    }
    Ok(IndependenceReport { bound, elements: parts.len(), rank: span.rank(), dependence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffRing;
    use crate::minsky::{library, Machine};

    fn qa() -> Algebra {
        Algebra::quotient(CoeffRing::Rationals)
    }

    fn sum_of(parts: &[(Element, DiffPoly)], dep: &[(String, Element)]) -> DiffPoly {
        let mut acc = DiffPoly::zero(qa());
        for (c, e) in dep {
            let (_, p) = parts.iter().find(|(pe, _)| pe == e).unwrap();
            let c: Coeff = c.parse().unwrap();
            acc = acc.add(&p.scale(&c)).unwrap();
        }
        acc
    }

    #[test]
    fn counts() {
        assert_eq!(v_operators(0, 0, 2).len(), 81);
        assert_eq!(v_operators(1, 1, 2).len(), 9);
        assert!(v_operators(0, 1, 3).iter().all(|v| v.b == 0 && v.validate().is_ok()));
    }

    #[test]
    fn acyclic_machines_are_full_rank() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let r = independence_check(&sys, 4).unwrap();
        assert_eq!(r.elements, 125 + 25);
        assert!(r.full_rank(), "{r:?}");
    }

    #[test]
    fn cycles_give_telescoping_dependence() {
        for m in [library::swap_cycle(), library::self_loop()] {
            let sys = EncodedSystem::compile(&m, qa()).unwrap();
            let r = independence_check(&sys, 2).unwrap();
            let dep = r.dependence.clone().expect("dependence");
            assert!(!r.full_rank());
            let parts = highest_parts(&sys, 2).unwrap();
            assert!(sum_of(&parts, &dep).is_zero());
        }
    }

    #[test]
    fn empty_system_is_vacuously_full_rank() {
        let sys = EncodedSystem::compile(&Machine::new(0, []).unwrap(), qa()).unwrap();
        let r = independence_check(&sys, 5).unwrap();
        assert_eq!((r.elements, r.rank), (0, 0));
        assert!(r.full_rank());
    }
}
