//! Gradings: total degree, the weighted pair `Deg = (deg₁, deg₂)`, the
//! per-variable and per-group degrees, and `deg_t`.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::{Base, DiffPoly, Group, Monomial};
use crate::error::{usage, Result};

/// `(deg₁, deg₂)`, compared lexicographically with `deg₁` dominant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiDegree {
    pub d1: BigUint,
    pub d2: BigUint,
}

impl MultiDegree {
    pub fn new(d1: u64, d2: u64) -> Self {
        MultiDegree { d1: d1.into(), d2: d2.into() }
    }

    pub fn add(&self, other: &MultiDegree) -> MultiDegree {
        MultiDegree { d1: &self.d1 + &other.d1, d2: &self.d2 + &other.d2 }
    }
}

impl std::fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.d1, self.d2)
    }
}

/// Result of a degree query on a nonzero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Homogeneous(u64),
    Inhomogeneous { max: u64 },
}

impl Degree {
    pub fn homogeneous(self) -> Option<u64> {
        match self {
            Degree::Homogeneous(d) => Some(d),
            Degree::Inhomogeneous { .. } => None,
        }
    }
}

/// Degrees in the `x₁`-group, `x₂`-group, `q`-group and `t`.
pub type GroupDegrees = [u64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grading {
    /// Standard polynomial degree.
    Total,
    /// `Deg = (deg₁, deg₂)`.
    Weighted,
    /// Degree in each individual `x`-variable, plus the `q`-group and `t`.
    XVariables,
    /// Degree in each of the groups `x₁`, `x₂`, `q`, `t`.
    BaseGroups,
    /// `deg_t`.
    TDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GradeKey {
    Total(u64),
    Weighted(MultiDegree),
    XVariables { x: Monomial, q: u64, t: u64 },
    Groups(GroupDegrees),
    T(u64),
}

fn group_slot(g: Group) -> usize {
    match g {
        Group::X1 => 0,
        Group::X2 => 1,
        Group::Q => 2,
        Group::T => 3,
    }
}

impl Monomial {
    /// `Deg(v)`: each `θ(x₁)` factor weighs `|θ|+1` in `deg₁`, each `θ(x₂)`
    /// factor `|θ|+1` in `deg₂`; other variables weigh nothing.
    pub fn multidegree(&self) -> MultiDegree {
        let mut out = MultiDegree::default();
        for (v, e) in self.factors() {
            let w = (v.theta.order() + 1u32) * *e;
            match v.base {
                Base::X1 => out.d1 += w,
                Base::X2 => out.d2 += w,
                _ => {}
            }
        }
        out
    }

    pub fn group_degrees(&self) -> GroupDegrees {
        let mut out = [0u64; 4];
        for (v, e) in self.factors() {
            out[group_slot(v.base.group())] += u64::from(*e);
        }
        out
    }

    pub fn t_degree(&self) -> u64 {
        self.group_degrees()[3]
    }

    pub fn grade(&self, grading: Grading) -> GradeKey {
        match grading {
            Grading::Total => GradeKey::Total(self.degree()),
            Grading::Weighted => GradeKey::Weighted(self.multidegree()),
            Grading::XVariables => {
                let g = self.group_degrees();
                GradeKey::XVariables { x: self.x_part(), q: g[2], t: g[3] }
            }
            Grading::BaseGroups => GradeKey::Groups(self.group_degrees()),
            Grading::TDegree => GradeKey::T(self.t_degree()),
        }
    }
}

impl DiffPoly {
    fn degree_by(&self, f: impl Fn(&Monomial) -> u64) -> Option<Degree> {
        let mut degs = self.terms().map(|(m, _)| f(m));
        let first = degs.next()?;
        let (mut lo, mut hi) = (first, first);
        for d in degs {
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Some(if lo == hi { Degree::Homogeneous(hi) } else { Degree::Inhomogeneous { max: hi } })
    }

    /// Standard polynomial degree. The zero polynomial has none.
    pub fn deg(&self) -> Result<Degree> {
        match self.degree_by(Monomial::degree) {
            Some(d) => Ok(d),
            None => usage("degree of the zero polynomial"),
        }
    }

    /// `deg_t`, or `None` for the zero polynomial.
    pub fn deg_t(&self) -> Option<Degree> {
        self.degree_by(Monomial::t_degree)
    }

    /// `Deg` of the highest homogeneous part.
    pub fn multidegree(&self) -> Result<MultiDegree> {
        match self.terms().map(|(m, _)| m.multidegree()).max() {
            Some(d) => Ok(d),
            None => usage("Deg of the zero polynomial"),
        }
    }

    /// Sum of the terms of lexicographically maximal `Deg`.
    pub fn highest_part(&self) -> Result<DiffPoly> {
        let top = self.multidegree()?;
        Ok(self.filter_terms(|m| m.multidegree() == top))
    }

    /// Homogeneous components keyed by grade, in ascending grade order.
    pub fn components(&self, grading: Grading) -> BTreeMap<GradeKey, DiffPoly> {
        let mut out: BTreeMap<GradeKey, DiffPoly> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.grade(grading)).or_insert_with(|| DiffPoly::zero(self.algebra())).add_term(m, c);
        }
        out
    }

    pub fn homogeneous_components(&self, grading: Grading) -> Vec<DiffPoly> {
        self.components(grading).into_values().collect()
    }

    pub fn is_homogeneous(&self, grading: Grading) -> bool {
        self.components(grading).len() <= 1
    }

    /// Group degrees if the polynomial is homogeneous in every group.
    pub fn group_degrees(&self) -> Option<GroupDegrees> {
        let comps = self.components(Grading::BaseGroups);
        match comps.keys().next() {
            Some(GradeKey::Groups(g)) if comps.len() == 1 => Some(*g),
            _ => None,
        }
    }
}
