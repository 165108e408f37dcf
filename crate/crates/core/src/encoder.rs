//! Compiles a Minsky machine into a system of differential generators.
//!
//! Each command `qᵢ ε σ → q_j T_α T_β` becomes the binomial
//!
//! ```text
//! x₁^ε x₂^σ δ₁^{1−ε} δ₂^{1−σ}(qᵢ) − x₁^ε x₂^σ δ₁^{1−ε+α} δ₂^{1−σ+β}(q_j)
//! ```
//!
//! and a configuration `[i, m, n]` becomes `x₁ x₂ δ₁^m δ₂^n(qᵢ)`. A step of
//! the machine is then one generator multiplied by a `W` operator.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::coeff::CoeffRing;
use crate::error::{invalid, Error, Result};
use crate::minsky::{Command, CommandKey, Config, Machine};
use crate::poly::{Algebra, Base, DiffPoly, DiffVar, Mode, Monomial};

/// Default cap on the δ₁ exponent of a test element.
pub const DEFAULT_EXPONENT_BUDGET: u64 = 1 << 16;

fn x1() -> DiffVar {
    DiffVar::plain(Base::X1)
}

fn x2() -> DiffVar {
    DiffVar::plain(Base::X2)
}

fn q(state: u32, d1: impl Into<BigUint>, d2: impl Into<BigUint>) -> DiffVar {
    DiffVar::d2(Base::Q(state), d1, d2)
}

fn shifted(base: u8, shift: i8) -> u32 {
    u32::try_from(i32::from(base) + i32::from(shift)).expect("command invariants keep exponents non-negative")
}

/// The generator of one command.
pub fn compile_command(alg: Algebra, c: &Command) -> Result<DiffPoly> {
    c.validate(None)?;
    check_two_derivations(alg)?;
    let x = [(x1(), u32::from(c.eps)), (x2(), u32::from(c.sigma))];
    let (e1, e2) = (1 - c.eps, 1 - c.sigma);
    let lead = Monomial::from_factors(x.iter().cloned().chain([(q(c.i, e1, e2), 1)]));
    let tail = Monomial::from_factors(x.into_iter().chain([(q(c.j, shifted(e1, c.alpha), shifted(e2, c.beta)), 1)]));
    let ring = alg.ring;
    Ok(DiffPoly::from_terms(alg, [(ring.one(), lead), (ring.from_i64(-1), tail)]))
}

fn check_two_derivations(alg: Algebra) -> Result<()> {
    if alg.derivations != 2 {
        return invalid("machine encodings use exactly two derivations");
    }
    Ok(())
}

/// The generators `δ₁(x₂)`, `δ₂(x₁)` of the ideal the quotient presentation
/// divides out, as free-algebra polynomials.
pub fn quotient_relations(ring: CoeffRing) -> [DiffPoly; 2] {
    let alg = Algebra::free(ring);
    [
        DiffPoly::monomial(alg, Monomial::var(DiffVar::d2(Base::X2, 1u32, 0u32))),
        DiffPoly::monomial(alg, Monomial::var(DiffVar::d2(Base::X1, 0u32, 1u32))),
    ]
}

/// A machine together with its generators.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSystem {
    machine: Machine,
    alg: Algebra,
    generators: Vec<(Command, DiffPoly)>,
}

impl EncodedSystem {
    /// Compiles every command, in key order.
    pub fn compile(machine: &Machine, alg: Algebra) -> Result<Self> {
        let generators = machine.commands().map(|c| Ok((*c, compile_command(alg, c)?))).collect::<Result<_>>()?;
        Ok(EncodedSystem { machine: machine.clone(), alg, generators })
    }

    pub fn machine(&self) -> &Machine {
        &self.machine
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn generators(&self) -> &[(Command, DiffPoly)] {
        &self.generators
    }

    pub fn generator(&self, key: CommandKey) -> Option<&DiffPoly> {
        self.generators.iter().find(|(c, _)| c.key() == key).map(|(_, g)| g)
    }

    /// `δ₁(x₂)`, `δ₂(x₁)` in the free presentation over this system's ring.
    pub fn j_generators(&self) -> [DiffPoly; 2] {
        quotient_relations(self.alg.ring)
    }

    /// Generators of the differential ideal in this system's own
    /// presentation: the command generators, plus the quotient relations
    /// when working in the free algebra.
    pub fn ideal_generators(&self) -> Vec<DiffPoly> {
        let mut out: Vec<DiffPoly> = self.generators.iter().map(|(_, g)| g.clone()).collect();
        if self.alg.mode == Mode::Free {
            out.extend(self.j_generators());
        }
        out
    }

    /// Commands whose stored generator differs from a fresh compilation
    /// (only possible for systems read from hand-edited files).
    pub fn mismatches(&self) -> Vec<Command> {
        self.generators
            .iter()
            .filter(|(c, g)| compile_command(self.alg, c).map_or(true, |fresh| &fresh != g))
            .map(|(c, _)| *c)
            .collect()
    }

    /// Generator file: a header, then each generator preceded by its command.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match self.alg.mode {
            Mode::Free => "free",
            Mode::Quotient => "quotient",
        };
        writeln!(out, "# field: {}", self.alg.ring).unwrap();
        writeln!(out, "# mode: {mode}").unwrap();
        writeln!(out, "# states: {}", self.machine.n()).unwrap();
        for (c, g) in &self.generators {
            writeln!(out, "# command {}", serde_json::to_string(c).unwrap()).unwrap();
            writeln!(out, "{g}").unwrap();
        }
        if self.alg.mode == Mode::Free {
            for j in self.j_generators() {
                writeln!(out, "# relation").unwrap();
                writeln!(out, "{j}").unwrap();
            }
        }
        out
    }

    /// Reads a generator file. The field may be overridden (e.g. to reduce a
    /// rational system modulo a prime).
    pub fn from_text(text: &str, ring_override: Option<CoeffRing>) -> Result<Self> {
        let mut ring = None;
        let mut mode = Mode::Quotient;
        let mut states = None;
        let mut pending: Option<Command> = None;
        let mut skip_next = false;
        let mut raw: Vec<(Command, String, usize)> = Vec::new();
        let err = |line: usize, msg: String| Error::Validation(format!("generator file, line {line}: {msg}"));
        for (k, line) in text.lines().enumerate() {
            let n = k + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("field:") {
                    ring = Some(v.trim().parse::<CoeffRing>().map_err(|e| err(n, e.to_string()))?);
                } else if let Some(v) = rest.strip_prefix("mode:") {
                    mode = match v.trim() {
                        "free" => Mode::Free,
                        "quotient" => Mode::Quotient,
                        other => return Err(err(n, format!("unknown mode `{other}`"))),
                    };
                } else if let Some(v) = rest.strip_prefix("states:") {
                    states = Some(v.trim().parse::<u32>().map_err(|e| err(n, e.to_string()))?);
                } else if let Some(v) = rest.strip_prefix("command") {
                    pending = Some(serde_json::from_str(v.trim()).map_err(|e| err(n, e.to_string()))?);
                } else if rest == "relation" {
                    skip_next = true;
                }
                continue;
            }
            if std::mem::take(&mut skip_next) {
                continue;
            }
            let cmd = pending.take().ok_or_else(|| err(n, "polynomial without a preceding `# command` line".into()))?;
            raw.push((cmd, line.to_string(), n));
        }
        let ring = ring_override.or(ring).unwrap_or_default();
        let alg = match mode {
            Mode::Free => Algebra::free(ring),
            Mode::Quotient => Algebra::quotient(ring),
        };
        let states = states.ok_or_else(|| err(1, "missing `# states:` header".into()))?;
        let machine = Machine::new(states, raw.iter().map(|(c, _, _)| *c))?;
        let mut generators = Vec::with_capacity(raw.len());
        for (c, text, n) in raw {
            let g = parse_in(alg, &text).map_err(|e| err(n, e.to_string()))?;
            generators.push((c, g));
        }
        generators.sort_by_key(|(c, _)| c.key());
        Ok(EncodedSystem { machine, alg, generators })
    }
}

/// Parses rational text and maps it into `alg`'s ring.
pub(crate) fn parse_in(alg: Algebra, text: &str) -> Result<DiffPoly> {
    let rational = Algebra { ring: CoeffRing::Rationals, ..alg };
    DiffPoly::parse(rational, text)?.convert(alg)
}

/// `x₁ x₂ δ₁^{c1} δ₂^{c2}(q_state)`.
pub fn config_element(alg: Algebra, c: &Config) -> DiffPoly {
    DiffPoly::monomial(alg, config_monomial(c, 0, 0))
}

/// `δ₁^a(x₁) δ₂^b(x₂) δ₁^{c1} δ₂^{c2}(q_state)`.
pub fn config_monomial(c: &Config, a: u32, b: u32) -> Monomial {
    Monomial::from_factors([
        (DiffVar::d2(Base::X1, a, 0u32), 1),
        (DiffVar::d2(Base::X2, 0u32, b), 1),
        (q(c.state, c.c1.clone(), c.c2.clone()), 1),
    ])
}

/// `u_start − u_halt`.
pub fn config_difference(alg: Algebra, start: &Config, halt: &Config) -> DiffPoly {
    let ring = alg.ring;
    DiffPoly::from_terms(alg, [(ring.one(), config_monomial(start, 0, 0)), (ring.from_i64(-1), config_monomial(halt, 0, 0))])
}

/// Reads a monomial of the shape `δ₁^a(x₁) δ₂^b(x₂) δ₁^i δ₂^j(q_k)` back into
/// `(config, a, b)`.
pub fn parse_config_monomial(m: &Monomial) -> Option<(Config, u32, u32)> {
    let [(v1, 1), (v2, 1), (vq, 1)] = m.factors() else { return None };
    let Base::Q(state) = vq.base else { return None };
    if v1.base != Base::X1 || v2.base != Base::X2 || !v1.theta.exp(1).is_zero() || !v2.theta.exp(0).is_zero() {
        return None;
    }
    let a = v1.theta.exp(0).to_u32()?;
    let b = v2.theta.exp(1).to_u32()?;
    Some((Config { state, c1: vq.theta.exp(0).clone(), c2: vq.theta.exp(1).clone() }, a, b))
}

/// Recognizes `u − v` for configuration monomials with `x`-part `x₁x₂`,
/// returning `(config(u), config(v))`.
pub fn parse_config_difference(p: &DiffPoly) -> Option<(Config, Config)> {
    let ring = p.ring();
    let mut plus = None;
    let mut minus = None;
    for (m, c) in p.terms() {
        let (cfg, 0, 0) = parse_config_monomial(m)? else { return None };
        if c.is_one() && plus.is_none() {
            plus = Some(cfg);
        } else if *c == ring.from_i64(-1) && minus.is_none() {
            minus = Some(cfg);
        } else {
            return None;
        }
    }
    Some((plus?, minus?))
}

/// `2^{2^m}`, if it stays within `budget`.
pub fn test_exponent(m_index: u32, budget: u64) -> Result<BigUint> {
    let too_big = || Error::Resource(format!("2^(2^{m_index}) exceeds the exponent budget {budget}"));
    let bits = 1u64.checked_shl(m_index).filter(|b| *b < 64).ok_or_else(too_big)?;
    let e = 1u64 << bits;
    if e > budget {
        return Err(too_big());
    }
    Ok(BigUint::from(e))
}

/// Start configuration `[1, 2^{2^m}, 0]` of the test element.
pub fn test_start(m_index: u32, budget: u64) -> Result<Config> {
    Ok(Config { state: 1, c1: test_exponent(m_index, budget)?, c2: BigUint::zero() })
}

/// `x₁x₂δ₁^{2^{2^m}}(q₁) − x₁x₂δ₁(q₀)`.
pub fn test_element(alg: Algebra, m_index: u32, budget: u64) -> Result<DiffPoly> {
    let start = test_start(m_index, budget)?;
    Ok(config_difference(alg, &start, &Config { state: 0, c1: BigUint::one(), c2: BigUint::zero() }))
}

/// The highest part of `δ₁^s δ₂^t g` predicted in closed form for the
/// quotient presentation.
pub fn highest_part_closed_form(alg: Algebra, c: &Command, s: u32, t: u32) -> DiffPoly {
    let xs = [
        (DiffVar::d2(Base::X1, s, 0u32), u32::from(c.eps)),
        (DiffVar::d2(Base::X2, 0u32, t), u32::from(c.sigma)),
    ];
    let d1 = (s + 1) * u32::from(1 - c.eps);
    let d2 = (t + 1) * u32::from(1 - c.sigma);
    let lead = Monomial::from_factors(xs.iter().cloned().chain([(q(c.i, d1, d2), 1)]));
    let tail_d1 = u32::try_from(i64::from(d1) + i64::from(c.alpha)).expect("non-negative");
    let tail_d2 = u32::try_from(i64::from(d2) + i64::from(c.beta)).expect("non-negative");
    let tail = Monomial::from_factors(xs.into_iter().chain([(q(c.j, tail_d1, tail_d2), 1)]));
    DiffPoly::from_terms(alg, [(alg.ring.one(), lead), (alg.ring.from_i64(-1), tail)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minsky::library;
    use crate::deriv::DerivOp;
    use crate::poly::{Degree, Grading};
    use proptest::prelude::*;

    fn qa() -> Algebra {
        Algebra::quotient(CoeffRing::Rationals)
    }

    fn p(s: &str) -> DiffPoly {
        DiffPoly::parse(qa(), s).unwrap()
    }

    fn cmd(i: u32, eps: u8, sigma: u8, j: u32, alpha: i8, beta: i8) -> Command {
        Command::new(i, eps, sigma, j, alpha, beta).unwrap()
    }

    #[test]
    fn generator_shapes() {
        // ε = 1, σ = 0 with α = 1, β = -1: x₁δ₂(qᵢ) − x₁δ₁δ₂⁰(q_j)
        let g = compile_command(qa(), &cmd(2, 1, 0, 3, 1, -1)).unwrap();
        assert_eq!(g, p("x1 * q2[0,1] - x1 * q3[1,0]"));
        let g = compile_command(qa(), &cmd(1, 1, 1, 0, 0, 0)).unwrap();
        assert_eq!(g, p("x1 * x2 * q1 - x1 * x2 * q0"));
        let g = compile_command(qa(), &cmd(4, 0, 0, 2, -1, 1)).unwrap();
        assert_eq!(g, p("q4[1,1] - q2[0,2]"));
    }

    #[test]
    fn dec1_by_hand() {
        let sys = EncodedSystem::compile(&library::dec1(), qa()).unwrap();
        let gens: Vec<String> = sys.generators().iter().map(|(_, g)| g.to_string()).collect();
        // (1,0,1)→(1,-1,0): x₂δ₁(q₁) − x₂q₁ ; (1,1,1)→(0,0,0): x₁x₂q₁ − x₁x₂q₀
        assert_eq!(gens, vec![p("x2 * q1[1,0] - x2 * q1").to_string(), p("x1 * x2 * q1 - x1 * x2 * q0").to_string()]);
        assert!(sys.ideal_generators().len() == 2);
        let free = EncodedSystem::compile(&library::dec1(), Algebra::free(CoeffRing::Rationals)).unwrap();
        assert_eq!(free.ideal_generators().len(), 4);
    }

    #[test]
    fn empty_machine() {
        let m = Machine::new(0, []).unwrap();
        let sys = EncodedSystem::compile(&m, qa()).unwrap();
        assert!(sys.generators().is_empty());
        assert_eq!(sys.j_generators()[0].to_string(), "x2[1,0]^1");
    }

    #[test]
    fn test_elements() {
        assert_eq!(test_element(qa(), 0, DEFAULT_EXPONENT_BUDGET).unwrap(), p("x1 * x2 * q1[2,0] - x1 * x2 * q0[1,0]"));
        let g2 = test_element(qa(), 2, DEFAULT_EXPONENT_BUDGET).unwrap();
        assert!(g2.to_string().contains("q1[16,0]"));
        assert!(test_element(qa(), 4, DEFAULT_EXPONENT_BUDGET).is_ok());
        assert!(matches!(test_element(qa(), 5, DEFAULT_EXPONENT_BUDGET), Err(Error::Resource(_))));
        assert!(matches!(test_element(qa(), 200, u64::MAX), Err(Error::Resource(_))));
        assert_eq!(config_element(qa(), &Config::new(0, 1u32, 0u32)), p("x1 * x2 * q0[1,0]"));
    }

    #[test]
    fn config_monomials_biject() {
        for state in 0..3 {
            for c1 in 0..4u32 {
                for c2 in 0..4u32 {
                    let c = Config::new(state, c1, c2);
                    let m = config_monomial(&c, 2, 1);
                    assert_eq!(parse_config_monomial(&m), Some((c.clone(), 2, 1)));
                }
            }
        }
        let diff = config_difference(qa(), &Config::new(1, 3u32, 0u32), &Config::new(0, 1u32, 0u32));
        assert_eq!(parse_config_difference(&diff), Some((Config::new(1, 3u32, 0u32), Config::new(0, 1u32, 0u32))));
        assert_eq!(parse_config_difference(&p("x1 * q1 - x1 * x2 * q0")), None);
    }

    #[test]
    fn generator_file_round_trip() {
        for e in library::all() {
            for alg in [qa(), Algebra::free(CoeffRing::gf2())] {
                let sys = EncodedSystem::compile(&e.machine, alg).unwrap();
                let text = sys.to_text();
                let back = EncodedSystem::from_text(&text, None).unwrap();
                assert_eq!(back, sys, "{}", e.name);
                assert_eq!(back.to_text(), text);
                assert!(back.mismatches().is_empty());
            }
        }
        let tampered = "# field: Q\n# states: 1\n# command {\"i\":1,\"eps\":1,\"sigma\":1,\"j\":0,\"alpha\":0,\"beta\":0}\nx1 * x2 * q1\n";
        assert_eq!(EncodedSystem::from_text(tampered, None).unwrap().mismatches().len(), 1);
        assert!(EncodedSystem::from_text("# field: Q\n# states: 1\nx1\n", None).is_err());
    }

    fn arb_command() -> impl Strategy<Value = Command> {
        (1u32..4, 0u8..2, 0u8..2, 0u32..4, -1i8..=1, -1i8..=1).prop_filter_map("side condition", |(i, e, s, j, a, b)| {
            Command::new(i, e, s, j, if e == 1 { a.max(0) } else { a }, if s == 1 { b.max(0) } else { b }).ok()
        })
    }

    proptest! {
        #[test]
        fn generators_are_homogeneous(c in arb_command()) {
            let g = compile_command(qa(), &c).unwrap();
            // A command that changes nothing compiles to zero.
            prop_assume!(!g.is_zero());
            prop_assert_eq!(g.deg().unwrap(), Degree::Homogeneous(1 + u64::from(c.eps) + u64::from(c.sigma)));
            prop_assert!(g.is_homogeneous(Grading::Weighted));
            prop_assert!(g.is_homogeneous(Grading::BaseGroups));
            prop_assert!(g.is_homogeneous(Grading::XVariables));
        }

        #[test]
        fn closed_form_matches_expansion(c in arb_command(), s in 0u32..=5, t in 0u32..=5) {
            let g = compile_command(qa(), &c).unwrap();
            let applied = g.apply_theta(&DerivOp::d2(s, t));
            let top = if applied.is_zero() { applied } else { applied.highest_part().unwrap() };
            prop_assert_eq!(top, highest_part_closed_form(qa(), &c, s, t));
        }
    }
}
