//! Telescoping certificates: one generator application per machine step.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::encoder::{config_difference, config_element, parse_in, EncodedSystem};
use crate::envop::WOperator;
use crate::error::{usage, Result};
use crate::minsky::{Command, Config, RunOutcome};
use crate::poly::{Algebra, DiffPoly, Mode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStep {
    pub w: WOperator,
    pub command: Command,
    pub from: Config,
    pub to: Config,
}

/// Claims `target = Σ_k w_k · g(command_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub steps: Vec<CertStep>,
    pub target: DiffPoly,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    field: String,
    target: String,
    steps: Vec<CertStep>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let file = CertificateFile {
            field: self.target.ring().to_string(),
            target: self.target.to_string(),
            steps: self.steps.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Parses a certificate, reading its target in `alg`.
    pub fn from_json(text: &str, alg: Algebra) -> Result<Certificate> {
        let file: CertificateFile = serde_json::from_str(text)?;
        Ok(Certificate { steps: file.steps, target: parse_in(alg, &file.target)? })
    }
}

/// The canonical witness for a step leaving `from`:
/// `x₁^{1−ε} x₂^{1−σ} δ₁^{max(c1−1,0)} δ₂^{max(c2−1,0)}`.
pub fn step_witness(from: &Config) -> WOperator {
    let (eps, sigma) = from.observed();
    let dec = |c: &BigUint| if c.is_zero() { BigUint::zero() } else { c - BigUint::one() };
    WOperator { eps, sigma, i: dec(&from.c1), j: dec(&from.c2) }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertifyOutcome {
    /// The run reached the requested halting configuration.
    Certified(Certificate),
    /// The run halted, but not at the requested configuration; the
    /// certificate covers the configuration actually reached.
    HaltedElsewhere { certificate: Certificate, reached: Config },
    /// No halt within the step budget (or the run got stuck or cycled):
    /// membership is not established either way.
    NotHalted { outcome: RunOutcome, steps: usize },
}

/// Simulates from `start` and, on halting, emits one witnessed step per
/// machine step. With `halt = None` any halting configuration is accepted.
pub fn certify(sys: &EncodedSystem, start: &Config, halt: Option<&Config>, max_steps: u64) -> Result<CertifyOutcome> {
    if start.state == 0 {
        return usage("certification needs a start configuration in a non-terminal state");
    }
    let trace = sys.machine().run(start, max_steps);
    if trace.outcome != RunOutcome::Halted {
        return Ok(CertifyOutcome::NotHalted { outcome: trace.outcome, steps: trace.steps() });
    }
    let steps: Vec<CertStep> = trace
        .commands
        .iter()
        .zip(trace.configs.windows(2))
        .map(|(cmd, pair)| CertStep { w: step_witness(&pair[0]), command: *cmd, from: pair[0].clone(), to: pair[1].clone() })
        .collect();
    let reached = trace.last().clone();
    let certificate = Certificate { steps, target: config_difference(sys.algebra(), start, &reached) };
    match halt {
        Some(h) if *h != reached => Ok(CertifyOutcome::HaltedElsewhere { certificate, reached }),
        _ => Ok(CertifyOutcome::Certified(certificate)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    /// `step` is the index of the first failing step, absent for failures of
    /// the certificate as a whole.
    Reject { step: Option<usize>, reason: String },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

fn reject(step: Option<usize>, reason: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict::Reject { step, reason: reason.into() })
}

/// Equality in the quotient presentation (free-algebra systems are compared
/// modulo the relations the quotient divides out).
fn same_class(a: &DiffPoly, b: &DiffPoly) -> Result<bool> {
    if a.algebra().mode == Mode::Quotient {
        return Ok(a == b);
    }
    Ok(a.quotient_image()? == b.quotient_image()?)
}

/// Recomputes every step symbolically and checks the telescoping sum.
pub fn verify_certificate(sys: &EncodedSystem, cert: &Certificate) -> Result<Verdict> {
    let alg = sys.algebra();
    if cert.target.algebra() != alg {
        return usage("certificate target and generator system live in different algebras");
    }
    let mut sum = DiffPoly::zero(alg);
    for (k, step) in cert.steps.iter().enumerate() {
        let at = Some(k);
        if let Err(e) = step.w.validate() {
            return reject(at, e.to_string());
        }
        let c = &step.command;
        if (step.w.eps, step.w.sigma) != (c.eps, c.sigma) {
            return reject(at, "w is not in W for the command's observed symbols");
        }
        let Some(g) = sys.generator(c.key()) else {
            return reject(at, format!("no generator for command {c}"));
        };
        if sys.machine().command(c.key()) != Some(c) {
            return reject(at, format!("command {c} is not the machine's command for its key"));
        }
        if step.from.state != c.i || step.from.observed() != (c.eps, c.sigma) {
            return reject(at, format!("command {c} does not fire at {}", step.from));
        }
        if step.to != step.from.apply(c) {
            return reject(at, format!("{} does not step to {} under {c}", step.from, step.to));
        }
        if k > 0 && cert.steps[k - 1].to != step.from {
            return reject(at, "configurations do not chain");
        }
        let applied = step.w.to_operator(alg)?.apply(g)?;
        let expected = config_element(alg, &step.from).sub(&config_element(alg, &step.to))?;
        if !same_class(&applied, &expected)? {
            return reject(at, "w·g differs from u(from) − u(to)");
        }
        sum = sum.add(&applied)?;
    }
    if let Some(last) = cert.steps.last() {
        if last.to.state != 0 {
            return reject(None, format!("final configuration {} is not terminal", last.to));
        }
    }
    if !same_class(&sum, &cert.target)? {
        return reject(None, "the sum of the steps differs from the target");
    }
    Ok(Verdict::Accept)
}

/// Whether `highest_part(w · g) = u(from) − u(to)` for the command's generator.
/// Over characteristic 2 the identity cannot tell `u − v` from `v − u`.
pub fn witness_identity_holds(alg: Algebra, cmd: &Command, w: &WOperator, from: &Config, to: &Config) -> Result<bool> {
    let g = crate::encoder::compile_command(alg, cmd)?;
    let applied = w.to_operator(alg)?.apply(&g)?;
    let expected = config_element(alg, from).sub(&config_element(alg, to))?;
    if applied.is_zero() {
        return Ok(expected.is_zero());
    }
    Ok(applied.highest_part()? == expected)
}
