//! Ideal membership for encoded machines: certificates from simulation, the
//! bounded algebraic oracle, the independence check, and a combined verdict.

mod certificate;
mod independence;
mod oracle;

use serde::Serialize;

pub use certificate::{certify, step_witness, verify_certificate, witness_identity_holds, CertStep, Certificate, CertifyOutcome, Verdict};
pub use independence::{highest_parts, independence_check, v_operators, Element, IndependenceReport};
pub use oracle::{oracle_member, Oracle, OracleBounds, OracleOutcome, OracleTerm};

use crate::encoder::{parse_config_difference, EncodedSystem};
use crate::error::Result;
use crate::minsky::{Config, RunOutcome};
use crate::poly::DiffPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub max_steps: u64,
    pub oracle: OracleBounds,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_steps: 10_000, oracle: OracleBounds::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Simulation {
    /// The run reached the target's second configuration; the certificate
    /// was checked.
    Certified { steps: usize, verified: bool },
    HaltedElsewhere { reached: Config },
    NotHalted { outcome: RunOutcome, steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Member,
    /// Only reported when a grading argument settles it at every bound.
    NonMember,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    /// Present when the target is a configuration difference `u − v`.
    pub simulation: Option<Simulation>,
    pub oracle: Option<OracleOutcome>,
    /// Why the oracle produced no outcome (e.g. the product cap was hit).
    pub oracle_error: Option<String>,
    pub overall: Overall,
    /// False if the two paths contradict each other.
    pub consistent: bool,
}

/// Runs the simulation path (for configuration differences) and the oracle
/// path, and reports the strongest verdict both support.
pub fn decide_membership(sys: &EncodedSystem, target: &DiffPoly, budgets: &Budgets) -> Result<Decision> {
    let image = target.quotient_image()?;
    let simulation = match parse_config_difference(&image) {
        Some((start, halt)) if start.state != 0 => Some(match certify(sys, &start, Some(&halt), budgets.max_steps)? {
            CertifyOutcome::Certified(cert) => {
                let verified = verify_certificate(sys, &cert)?.is_accept();
                Simulation::Certified { steps: cert.steps.len(), verified }
            }
            CertifyOutcome::HaltedElsewhere { reached, .. } => Simulation::HaltedElsewhere { reached },
            CertifyOutcome::NotHalted { outcome, steps } => Simulation::NotHalted { outcome, steps },
        }),
        _ => None,
    };
    let (oracle, oracle_error) = match Oracle::for_system(sys, budgets.oracle).and_then(|mut o| {
        let out = o.member(target)?;
        if let OracleOutcome::Member { terms } = &out {
            assert_eq!(o.evaluate(terms), image.convert(crate::poly::Algebra::quotient(image.ring()))?, "oracle solution does not evaluate to the target");
        }
        Ok(out)
    }) {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let sim_member = matches!(simulation, Some(Simulation::Certified { verified: true, .. }));
    let oracle_member = oracle.as_ref().is_some_and(OracleOutcome::is_member);
    let refuted = matches!(oracle, Some(OracleOutcome::CertifiedNonMember { .. }));
    let member = sim_member || oracle_member;
    let consistent = !(member && refuted);
    let overall = match (member, refuted) {
        (true, false) => Overall::Member,
        (false, true) => Overall::NonMember,
        _ => Overall::Unknown,
    };
    Ok(Decision { simulation, oracle, oracle_error, overall, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffRing;
    use crate::encoder::config_difference;
    use crate::minsky::library;
    use crate::poly::Algebra;

    fn qa() -> Algebra {
        Algebra::quotient(CoeffRing::Rationals)
    }

    fn budgets() -> Budgets {
        Budgets { max_steps: 1000, oracle: OracleBounds { max_order: 5, max_xdeg: 1, ..OracleBounds::default() } }
    }

    #[test]
    fn halting_start_is_member_both_ways() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let target = config_difference(qa(), &Config::new(1, 3u32, 0u32), &Config::new(0, 0u32, 0u32));
        let d = decide_membership(&sys, &target, &budgets()).unwrap();
        assert_eq!(d.overall, Overall::Member);
        assert_eq!(d.simulation, Some(Simulation::Certified { steps: 4, verified: true }));
        assert!(d.oracle.unwrap().is_member());
        assert!(d.consistent);
    }

    #[test]
    fn non_halting_targets_never_member() {
        let inc = EncodedSystem::compile(&library::inc_forever(), qa()).unwrap();
        let target = config_difference(qa(), &Config::new(1, 0u32, 0u32), &Config::new(0, 1u32, 0u32));
        let d = decide_membership(&inc, &target, &budgets()).unwrap();
        assert_eq!(d.overall, Overall::NonMember);
        assert!(matches!(d.simulation, Some(Simulation::NotHalted { outcome: RunOutcome::BudgetExceeded, .. })));

        let even = EncodedSystem::compile(&library::even(), qa()).unwrap();
        let target = config_difference(qa(), &Config::new(1, 3u32, 0u32), &Config::new(0, 1u32, 0u32));
        let d = decide_membership(&even, &target, &budgets()).unwrap();
        assert_eq!(d.overall, Overall::Unknown);
        assert!(matches!(d.oracle, Some(OracleOutcome::NotMemberWithinBounds { .. })));
    }

    #[test]
    fn inhomogeneous_targets_are_split() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let a = config_difference(qa(), &Config::new(1, 1u32, 0u32), &Config::new(0, 0u32, 0u32));
        let target = a.add(&sys.generators()[0].1).unwrap();
        let d = decide_membership(&sys, &target, &budgets()).unwrap();
        assert_eq!(d.simulation, None);
        assert_eq!(d.overall, Overall::Member);
    }
}
