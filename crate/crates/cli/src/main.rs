//! `diffreduce`: run counter machines, compile them to differential
//! generators, and certify or refute membership of configuration elements.
//!
//! Exit codes: 0 when a result is established, 2 when a budget ran out or the
//! answer is unknown, 1 on errors (bad input, rejected certificate or lift).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use diffreduce::encoder::{config_difference, test_element};
use diffreduce::membership::{
    certify, decide_membership, independence_check, oracle_member, verify_certificate, Budgets, CertifyOutcome, Overall, Verdict,
};
use diffreduce::minsky::{library, load_machine, machine_to_json, RunOutcome};
use diffreduce::subalgebra::{LiftFile, SubalgebraSystem, TfMembership};
use diffreduce::{Algebra, Certificate, CoeffRing, Config, DiffPoly, EncodedSystem, OracleBounds, OracleOutcome};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "diffreduce", version, about = "Counter machines as differential ideal membership problems")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Coefficient field: Q, GF2 or Zp:<prime>. Defaults to Q, or to the
    /// field recorded in a generator file.
    #[arg(long, global = true, env = "DIFFREDUCE_FIELD")]
    field: Option<CoeffRing>,
    #[arg(long, global = true, env = "DIFFREDUCE_MAX_STEPS", default_value_t = 10_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    /// Largest derivation exponent the oracle enumerates.
    #[arg(long, global = true, env = "DIFFREDUCE_MAX_ORDER", default_value_t = 8,
          value_parser = clap::value_parser!(u32).range(1..))]
    max_order: u32,
    /// Largest derivative order of x multipliers in the oracle.
    #[arg(long, global = true, env = "DIFFREDUCE_MAX_XDEG", default_value_t = 2)]
    max_xdeg: u32,
    /// Largest derivation exponent allowed in a test element.
    #[arg(long, global = true, env = "DIFFREDUCE_EXPONENT_BUDGET", default_value_t = diffreduce::encoder::DEFAULT_EXPONENT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    exponent_budget: u64,
    #[arg(long, global = true, env = "DIFFREDUCE_JOBS", default_value_t = 1,
          value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Enumerate every multiplier of the right total degree.
    #[arg(long, global = true, env = "DIFFREDUCE_STRICT_ORACLE")]
    strict_oracle: bool,
    /// Write the machine-readable result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a bundled machine file (`list` shows the names).
    Machine { name: String },
    /// Simulate a machine from a start configuration `[state,c1,c2]`.
    Run { machine: PathBuf, start: Config },
    /// Write the generator file of a machine.
    Compile {
        machine: PathBuf,
        #[arg(long, value_enum, default_value_t = Presentation::Quotient)]
        mode: Presentation,
    },
    /// Simulate and emit a membership certificate for `u(start) - u(halt)`.
    Certify {
        machine: PathBuf,
        start: Config,
        /// Expected halting configuration; any halt is accepted if omitted.
        halt: Option<Config>,
        #[arg(long, value_enum, default_value_t = Presentation::Quotient)]
        mode: Presentation,
    },
    /// Check a certificate against a generator file.
    Verify { generators: PathBuf, certificate: PathBuf },
    /// Bounded linear-algebra membership search.
    Oracle {
        generators: PathBuf,
        /// A polynomial, `[i,a,b] -> [j,c,d]`, or `test:<m>`.
        target: String,
    },
    /// Simulation and oracle together, with a combined verdict.
    Decide { generators: PathBuf, target: String },
    /// Rank of the highest parts of all generator derivatives up to a bound.
    Independence {
        generators: PathBuf,
        #[arg(long, default_value_t = 5)]
        bound: u32,
    },
    /// Print the test element for index m.
    TestElement {
        m: u32,
        #[arg(long, value_enum, default_value_t = Presentation::Quotient)]
        mode: Presentation,
    },
    /// Lifting `t·f` into the differential subalgebra.
    #[command(subcommand)]
    Subalg(SubalgCmd),
}

#[derive(Subcommand)]
enum SubalgCmd {
    /// Find an expression for `t·f` and write a lift file.
    Lift { generators: PathBuf, target: String },
    /// Re-evaluate a lift file.
    Verify { generators: PathBuf, lift: PathBuf },
    /// Report the bounded verdict for `t·f`.
    Refute { generators: PathBuf, target: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Presentation {
    Free,
    Quotient,
}

impl Opts {
    fn algebra(&self, mode: Presentation) -> Algebra {
        let ring = self.field.unwrap_or(CoeffRing::Rationals);
        match mode {
            Presentation::Free => Algebra::free(ring),
            Presentation::Quotient => Algebra::quotient(ring),
        }
    }

    fn bounds(&self) -> OracleBounds {
        OracleBounds {
            max_order: self.max_order,
            max_xdeg: self.max_xdeg,
            strict: self.strict_oracle,
            jobs: self.jobs as usize,
            ..OracleBounds::default()
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn emit_json(&self, value: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.emit(&s)
    }
}

/// What a subcommand established.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Established,
    Unknown,
    Failed,
}

impl Status {
    fn code(self) -> ExitCode {
        match self {
            Status::Established => ExitCode::SUCCESS,
            Status::Unknown => ExitCode::from(2),
            Status::Failed => ExitCode::from(1),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_system(path: &Path, opts: &Opts) -> Result<EncodedSystem> {
    let text = read(path)?;
    EncodedSystem::from_text(&text, opts.field).with_context(|| format!("loading generators from {}", path.display()))
}

/// Targets are a polynomial, a configuration pair `[i,a,b] -> [j,c,d]`, or
/// `test:<m>`.
fn parse_target(text: &str, alg: Algebra, opts: &Opts) -> Result<DiffPoly> {
    let text = text.trim();
    if let Some(m) = text.strip_prefix("test:") {
        let m: u32 = m.trim().parse().context("test element index")?;
        return Ok(test_element(alg, m, opts.exponent_budget)?);
    }
    if let Some((a, b)) = text.split_once("->") {
        let start: Config = a.trim().parse()?;
        let halt: Config = b.trim().parse()?;
        return Ok(config_difference(alg, &start, &halt));
    }
    // Parse over Q first so rational coefficients reduce into finite fields.
    let rational = Algebra { ring: CoeffRing::Rationals, ..alg };
    Ok(DiffPoly::parse(rational, text)?.convert(alg)?)
}

fn cmd_machine(opts: &Opts, name: &str) -> Result<Status> {
    if name == "list" {
        let names: Vec<_> = library::all().into_iter().map(|e| e.name).collect();
        opts.emit(&format!("{}\n", names.join("\n")))?;
        return Ok(Status::Established);
    }
    let m = library::by_name(name).ok_or_else(|| anyhow!("no bundled machine named `{name}`"))?;
    opts.emit(&machine_to_json(&m))?;
    Ok(Status::Established)
}

fn cmd_run(opts: &Opts, machine: &Path, start: &Config) -> Result<Status> {
    let m = load_machine(&read(machine)?).with_context(|| format!("loading {}", machine.display()))?;
    let trace = m.run(start, opts.max_steps);
    #[derive(Serialize)]
    struct Report<'a> {
        outcome: RunOutcome,
        steps: usize,
        last: &'a Config,
        configs: &'a [Config],
    }
    opts.emit_json(&Report { outcome: trace.outcome, steps: trace.steps(), last: trace.last(), configs: &trace.configs })?;
    let status = match trace.outcome {
        RunOutcome::Halted => {
            eprintln!("halted at {} after {} steps", trace.last(), trace.steps());
            Status::Established
        }
        RunOutcome::Stuck => {
            eprintln!("stuck at {} after {} steps: no command for the observed state", trace.last(), trace.steps());
            Status::Established
        }
        RunOutcome::CycleDetected { step, first_seen } => {
            eprintln!("cycle: step {step} revisits the configuration of step {first_seen} ({})", trace.last());
            Status::Established
        }
        RunOutcome::BudgetExceeded => {
            eprintln!("no halt within {} steps", opts.max_steps);
            Status::Unknown
        }
    };
    Ok(status)
}

fn cmd_compile(opts: &Opts, machine: &Path, mode: Presentation) -> Result<Status> {
    let m = load_machine(&read(machine)?).with_context(|| format!("loading {}", machine.display()))?;
    let sys = EncodedSystem::compile(&m, opts.algebra(mode))?;
    opts.emit(&sys.to_text())?;
    eprintln!("{} generators over {}", sys.generators().len(), sys.algebra().ring);
    Ok(Status::Established)
}

fn cmd_certify(opts: &Opts, machine: &Path, start: &Config, halt: Option<&Config>, mode: Presentation) -> Result<Status> {
    let m = load_machine(&read(machine)?).with_context(|| format!("loading {}", machine.display()))?;
    let sys = EncodedSystem::compile(&m, opts.algebra(mode))?;
    Ok(match certify(&sys, start, halt, opts.max_steps)? {
        CertifyOutcome::Certified(cert) => {
            opts.emit(&cert.to_json())?;
            eprintln!("certified in {} steps", cert.steps.len());
            Status::Established
        }
        CertifyOutcome::HaltedElsewhere { certificate, reached } => {
            opts.emit(&certificate.to_json())?;
            eprintln!("halted at {reached}, not at the requested configuration; certificate covers {reached}");
            Status::Unknown
        }
        CertifyOutcome::NotHalted { outcome, steps } => {
            #[derive(Serialize)]
            struct NotHalted {
                outcome: RunOutcome,
                steps: usize,
            }
            opts.emit_json(&NotHalted { outcome, steps })?;
            eprintln!("no certificate: run ended with {outcome:?} after {steps} steps");
            Status::Unknown
        }
    })
}

fn report_verdict(opts: &Opts, verdict: &Verdict, what: &str) -> Result<Status> {
    opts.emit_json(verdict)?;
    Ok(match verdict {
        Verdict::Accept => {
            eprintln!("{what} accepted");
            Status::Established
        }
        Verdict::Reject { step: Some(k), reason } => {
            eprintln!("{what} rejected at step {k}: {reason}");
            Status::Failed
        }
        Verdict::Reject { step: None, reason } => {
            eprintln!("{what} rejected: {reason}");
            Status::Failed
        }
    })
}

fn cmd_verify(opts: &Opts, generators: &Path, certificate: &Path) -> Result<Status> {
    let sys = load_system(generators, opts)?;
    let cert = Certificate::from_json(&read(certificate)?, sys.algebra()).with_context(|| format!("loading {}", certificate.display()))?;
    report_verdict(opts, &verify_certificate(&sys, &cert)?, "certificate")
}

fn cmd_oracle(opts: &Opts, generators: &Path, target: &str) -> Result<Status> {
    let sys = load_system(generators, opts)?;
    let f = parse_target(target, sys.algebra(), opts)?;
    let outcome = oracle_member(&sys, &f, opts.bounds())?;
    opts.emit_json(&outcome)?;
    Ok(match &outcome {
        OracleOutcome::Member { terms } => {
            eprintln!("member: combination of {} products", terms.len());
            Status::Established
        }
        OracleOutcome::CertifiedNonMember { reason } => {
            eprintln!("not a member ({reason})");
            Status::Established
        }
        OracleOutcome::NotMemberWithinBounds { products, .. } => {
            eprintln!("not a member within bounds ({products} products, max order {})", opts.max_order);
            Status::Unknown
        }
    })
}

fn cmd_decide(opts: &Opts, generators: &Path, target: &str) -> Result<Status> {
    let sys = load_system(generators, opts)?;
    let f = parse_target(target, sys.algebra(), opts)?;
    let budgets = Budgets { max_steps: opts.max_steps, oracle: opts.bounds() };
    let d = decide_membership(&sys, &f, &budgets)?;
    opts.emit_json(&d)?;
    if !d.consistent {
        eprintln!("simulation and oracle disagree");
        return Ok(Status::Failed);
    }
    eprintln!("{:?}", d.overall);
    Ok(match d.overall {
        Overall::Member | Overall::NonMember => Status::Established,
        Overall::Unknown => Status::Unknown,
    })
}

fn cmd_independence(opts: &Opts, generators: &Path, bound: u32) -> Result<Status> {
    let sys = load_system(generators, opts)?;
    let report = independence_check(&sys, bound)?;
    opts.emit_json(&report)?;
    match &report.dependence {
        None => eprintln!("rank {} of {} at bound {bound}: independent", report.rank, report.elements),
        Some(dep) => eprintln!("rank {} of {} at bound {bound}: dependence with {} terms", report.rank, report.elements, dep.len()),
    }
    Ok(Status::Established)
}

fn cmd_test_element(opts: &Opts, m: u32, mode: Presentation) -> Result<Status> {
    let g = test_element(opts.algebra(mode), m, opts.exponent_budget)?;
    opts.emit(&format!("{g}\n"))?;
    Ok(Status::Established)
}

fn tf_status(outcome: &TfMembership) -> Status {
    match outcome {
        TfMembership::Member { expression } => {
            eprintln!("t·f is in the subalgebra ({} generator leaves)", expression.leaves());
            Status::Established
        }
        TfMembership::CertifiedNonMember { reason } => {
            eprintln!("t·f is not in the subalgebra ({reason})");
            Status::Established
        }
        TfMembership::NotMemberWithinBounds { products, .. } => {
            eprintln!("no lift within bounds ({products} products)");
            Status::Unknown
        }
    }
}

fn cmd_subalg(opts: &Opts, cmd: &SubalgCmd) -> Result<Status> {
    match cmd {
        SubalgCmd::Lift { generators, target } | SubalgCmd::Refute { generators, target } => {
            let sys = load_system(generators, opts)?;
            let sub = SubalgebraSystem::from_encoded(&sys)?;
            let f = parse_target(target, sys.algebra(), opts)?;
            let outcome = sub.refute_tf_membership_bounded(&f, opts.bounds())?;
            match (&outcome, cmd) {
                (TfMembership::Member { expression }, SubalgCmd::Lift { .. }) => {
                    opts.emit(&LiftFile { f: f.to_string(), expression: expression.clone() }.to_json())?
                }
                _ => opts.emit_json(&outcome)?,
            }
            Ok(tf_status(&outcome))
        }
        SubalgCmd::Verify { generators, lift } => {
            let sys = load_system(generators, opts)?;
            let sub = SubalgebraSystem::from_encoded(&sys)?;
            let file = LiftFile::from_json(&read(lift)?).with_context(|| format!("loading {}", lift.display()))?;
            let f = file.f_in(sys.algebra())?;
            report_verdict(opts, &sub.verify_lift(&file.expression, &f)?, "lift")
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Status> {
    let opts = &cli.opts;
    match &cli.cmd {
        Cmd::Machine { name } => cmd_machine(opts, name),
        Cmd::Run { machine, start } => cmd_run(opts, machine, start),
        Cmd::Compile { machine, mode } => cmd_compile(opts, machine, *mode),
        Cmd::Certify { machine, start, halt, mode } => cmd_certify(opts, machine, start, halt.as_ref(), *mode),
        Cmd::Verify { generators, certificate } => cmd_verify(opts, generators, certificate),
        Cmd::Oracle { generators, target } => cmd_oracle(opts, generators, target),
        Cmd::Decide { generators, target } => cmd_decide(opts, generators, target),
        Cmd::Independence { generators, bound } => cmd_independence(opts, generators, *bound),
        Cmd::TestElement { m, mode } => cmd_test_element(opts, *m, *mode),
        Cmd::Subalg(cmd) => cmd_subalg(opts, cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap reports usage errors with 2, which is reserved for "unknown".
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(field) = cli.opts.field {
        if field == CoeffRing::Integers {
            eprintln!("error: --field must be a field (Q, GF2 or Zp:<prime>)");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use diffreduce::Mode;

    fn opts() -> Opts {
        Cli::try_parse_from(["diffreduce", "test-element", "0"]).unwrap().opts
    }

    #[test]
    fn targets_parse_in_all_three_forms() {
        let alg = Algebra::quotient(CoeffRing::Rationals);
        let o = opts();
        let pair = parse_target("[1,2,0] -> [0,1,0]", alg, &o).unwrap();
        let text = parse_target("x1*x2*q1[2,0] - x1*x2*q0[1,0]", alg, &o).unwrap();
        let test = parse_target("test:0", alg, &o).unwrap();
        assert_eq!(pair, text);
        assert_eq!(pair, test);
    }

    #[test]
    fn rational_targets_reduce_into_finite_fields() {
        let alg = Algebra::quotient(CoeffRing::gf2());
        let p = parse_target("1/3*q0 + q1", alg, &opts()).unwrap();
        assert_eq!(p.to_string(), parse_target("q0 + q1", alg, &opts()).unwrap().to_string());
    }

    #[test]
    fn bounds_come_from_flags() {
        let cli = Cli::try_parse_from(["diffreduce", "--max-order", "3", "--strict-oracle", "--jobs", "2", "test-element", "1"]).unwrap();
        let b = cli.opts.bounds();
        assert_eq!((b.max_order, b.strict, b.jobs), (3, true, 2));
        assert!(Cli::try_parse_from(["diffreduce", "--max-order", "0", "test-element", "1"]).is_err());
    }

    #[test]
    fn free_mode_is_selectable() {
        assert_eq!(opts().algebra(Presentation::Free).mode, Mode::Free);
    }
}
