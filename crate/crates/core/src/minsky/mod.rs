//! Two-counter Minsky machines.
//!
//! A configuration `[i, m, n]` records the state and the cell indices the
//! head observes on both tapes. Cell 0 holds the only `1` on each tape, so the
//! observed symbols are `ε = [m = 0]` and `σ = [n = 0]`. Executing
//! `qᵢ ε σ → q_j T_α T_β` moves to `[j, m + α, n + β]`.

mod file;
pub mod library;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::serde_util::biguint_num;

pub use file::{load_machine, machine_to_json};

/// `qᵢ ε σ → q_j T_α T_β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Command {
    pub i: u32,
    pub eps: u8,
    pub sigma: u8,
    pub j: u32,
    pub alpha: i8,
    pub beta: i8,
}

pub type CommandKey = (u32, u8, u8);

impl Command {
    pub fn new(i: u32, eps: u8, sigma: u8, j: u32, alpha: i8, beta: i8) -> Result<Self> {
        let c = Command { i, eps, sigma, j, alpha, beta };
        c.validate(None)?;
        Ok(c)
    }

    pub fn key(&self) -> CommandKey {
        (self.i, self.eps, self.sigma)
    }

    /// Checks the command format; with `Some(n)`, also the state range.
    pub fn validate(&self, n: Option<u32>) -> Result<()> {
        if self.eps > 1 || self.sigma > 1 {
            return invalid(format!("observed symbols must be 0 or 1 in {self}"));
        }
        if !(-1..=1).contains(&self.alpha) || !(-1..=1).contains(&self.beta) {
            return invalid(format!("shifts must lie in {{-1, 0, 1}} in {self}"));
        }
        if self.eps == 1 && self.alpha < 0 {
            return invalid(format!("alpha must be >= 0 when eps = 1 in {self}"));
        }
        if self.sigma == 1 && self.beta < 0 {
            return invalid(format!("beta must be >= 0 when sigma = 1 in {self}"));
        }
        if self.i == 0 {
            return invalid(format!("q0 is terminal and cannot have commands ({self})"));
        }
        if let Some(n) = n {
            if self.i > n || self.j > n {
                return invalid(format!("state out of range 0..={n} in {self}"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{} {} {} -> q{} T{} T{}", self.i, self.eps, self.sigma, self.j, self.alpha, self.beta)
    }
}

/// A deterministic machine: at most one command per `(state, ε, σ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    n: u32,
    table: BTreeMap<CommandKey, Command>,
}

impl Machine {
    pub fn new(n: u32, commands: impl IntoIterator<Item = Command>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for c in commands {
            c.validate(Some(n))?;
            if let Some(prev) = table.insert(c.key(), c) {
                return invalid(format!("two commands for key (q{}, {}, {}): {prev} and {c}", c.i, c.eps, c.sigma));
            }
        }
        Ok(Machine { n, table })
    }

    /// Number of non-terminal states.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Commands in ascending key order.
    pub fn commands(&self) -> impl Iterator<Item = &Command> {
        self.table.values()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn command(&self, key: CommandKey) -> Option<&Command> {
        self.table.get(&key)
    }

    /// The command that fires at `c`, if any.
    pub fn command_at(&self, c: &Config) -> Option<&Command> {
        let (eps, sigma) = c.observed();
        self.command((c.state, eps, sigma))
    }

    pub fn step(&self, c: &Config) -> Step {
        if c.state == 0 {
            return Step::Halted;
        }
        match self.command_at(c) {
            None => Step::Stuck,
            Some(cmd) => Step::Moved { to: c.apply(cmd), command: *cmd },
        }
    }

    /// Runs from `start` for at most `max_steps` steps, stopping early on
    /// halting, a missing command, or a configuration seen earlier in this run.
    pub fn run(&self, start: &Config, max_steps: u64) -> Trace {
        let mut configs = vec![start.clone()];
        let mut commands = Vec::new();
        let mut seen: HashMap<Config, usize> = HashMap::new();
        seen.insert(start.clone(), 0);
        let mut current = start.clone();
        loop {
            let taken = commands.len() as u64;
            match self.step(&current) {
                Step::Halted => return Trace { configs, commands, outcome: RunOutcome::Halted },
                Step::Stuck => return Trace { configs, commands, outcome: RunOutcome::Stuck },
                Step::Moved { .. } if taken == max_steps => {
                    return Trace { configs, commands, outcome: RunOutcome::BudgetExceeded }
                }
                Step::Moved { to, command } => {
                    commands.push(command);
                    configs.push(to.clone());
                    let step = commands.len();
                    if let Some(&first) = seen.get(&to) {
                        return Trace { configs, commands, outcome: RunOutcome::CycleDetected { step, first_seen: first } };
                    }
                    seen.insert(to.clone(), step);
                    current = to;
                }
            }
        }
    }

    /// Semi-check for cycles: runs from every start and reports any repeated
    /// configuration. Finding none is not a proof of acyclicity.
    pub fn check_acyclic_bounded(&self, starts: &[Config], max_steps: u64) -> AcyclicityReport {
        let entries = starts
            .iter()
            .map(|s| {
                let trace = self.run(s, max_steps);
                (s.clone(), trace.outcome, trace.steps())
            })
            .collect();
        AcyclicityReport { entries }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Moved { to: Config, command: Command },
    Halted,
    Stuck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RunOutcome {
    Halted,
    /// No command for the observed key; treated as non-halting.
    Stuck,
    BudgetExceeded,
    /// The configuration reached at `step` was already visited at `first_seen`.
    CycleDetected { step: usize, first_seen: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Every configuration visited, starting with the initial one.
    pub configs: Vec<Config>,
    /// The command executed at each step.
    pub commands: Vec<Command>,
    pub outcome: RunOutcome,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.commands.len()
    }

    pub fn last(&self) -> &Config {
        self.configs.last().expect("trace starts with a configuration")
    }

    /// Largest counter value met along the run.
    pub fn max_counter(&self) -> BigUint {
        self.configs.iter().flat_map(|c| [&c.c1, &c.c2]).max().cloned().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicityReport {
    pub entries: Vec<(Config, RunOutcome, usize)>,
}

impl AcyclicityReport {
    pub fn cycle_found(&self) -> bool {
        self.entries.iter().any(|(_, o, _)| matches!(o, RunOutcome::CycleDetected { .. }))
    }
}

/// `[state, c1, c2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "ConfigRepr", from = "ConfigRepr")]
pub struct Config {
    pub state: u32,
    pub c1: BigUint,
    pub c2: BigUint,
}

#[derive(Serialize, Deserialize)]
struct ConfigRepr(u32, #[serde(with = "biguint_num")] BigUint, #[serde(with = "biguint_num")] BigUint);

impl From<Config> for ConfigRepr {
    fn from(c: Config) -> Self {
        ConfigRepr(c.state, c.c1, c.c2)
    }
}

impl From<ConfigRepr> for Config {
    fn from(r: ConfigRepr) -> Self {
        Config { state: r.0, c1: r.1, c2: r.2 }
    }
}

impl Config {
    pub fn new(state: u32, c1: impl Into<BigUint>, c2: impl Into<BigUint>) -> Self {
        Config { state, c1: c1.into(), c2: c2.into() }
    }

    /// Observed symbols `(ε, σ)`.
    pub fn observed(&self) -> (u8, u8) {
        (u8::from(self.c1.is_zero()), u8::from(self.c2.is_zero()))
    }

    /// Executes `cmd` regardless of whether it matches the observed key.
    pub(crate) fn apply(&self, cmd: &Command) -> Config {
        Config { state: cmd.j, c1: shift(&self.c1, cmd.alpha), c2: shift(&self.c2, cmd.beta) }
    }
}

fn shift(c: &BigUint, by: i8) -> BigUint {
    match by {
        1 => c + 1u32,
        -1 => {
            assert!(!c.is_zero(), "counter would become negative");
            c - BigUint::one()
        }
        _ => c.clone(),
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.state, self.c1, self.c2)
    }
}

impl FromStr for Config {
    type Err = Error;

    /// Accepts `[i,m,n]` or `i,m,n`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(t);
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        let bad = || Error::Validation(format!("bad configuration `{s}` (expected [state,c1,c2])"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Config {
            state: parts[0].parse().map_err(|_| bad())?,
            c1: parts[1].parse().map_err(|_| bad())?,
            c2: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_invariants() {
        assert!(Command::new(1, 1, 0, 0, -1, 0).is_err());
        assert!(Command::new(1, 0, 1, 0, 0, -1).is_err());
        assert!(Command::new(0, 0, 0, 1, 0, 0).is_err());
        assert!(Command::new(1, 0, 0, 2, -1, -1).is_ok());
        assert!(Machine::new(1, [Command::new(1, 0, 0, 2, 0, 0).unwrap()]).is_err());
        let c = Command::new(1, 1, 1, 0, 0, 0).unwrap();
        assert!(Machine::new(1, [c, c]).is_err());
    }

    #[test]
    fn step_semantics() {
        let m = library::single();
        assert_eq!(m.step(&Config::new(0, 5u32, 2u32)), Step::Halted);
        assert_eq!(m.step(&Config::new(1, 0u32, 0u32)).to_config(), Some(Config::new(0, 0u32, 0u32)));
        assert_eq!(m.step(&Config::new(1, 1u32, 0u32)), Step::Stuck);
        // q_i 1 0 -> q_j T_α T_β from [i, 0, t+1] lands on [j, α, t+1+β]
        for (alpha, beta) in [(0, -1), (1, 0), (1, 1), (0, 1)] {
            let m = Machine::new(2, [Command::new(1, 1, 0, 2, alpha, beta).unwrap()]).unwrap();
            let t = 4u32;
            let to = m.step(&Config::new(1, 0u32, t + 1)).to_config().unwrap();
            assert_eq!(to, Config::new(2, alpha as u32, (t as i64 + 1 + beta as i64) as u32));
        }
    }

    #[test]
    fn run_outcomes() {
        let single = library::single();
        let tr = single.run(&Config::new(1, 0u32, 0u32), 10);
        assert_eq!(tr.outcome, RunOutcome::Halted);
        assert_eq!(tr.configs.len(), 2);

        let self_loop = library::self_loop();
        let tr = self_loop.run(&Config::new(1, 0u32, 0u32), 10);
        assert_eq!(tr.outcome, RunOutcome::CycleDetected { step: 1, first_seen: 0 });

        // Only the (1,1) key is defined: the second configuration observes (0,0).
        let grow = Machine::new(1, [Command::new(1, 1, 1, 1, 1, 1).unwrap()]).unwrap();
        let tr = grow.run(&Config::new(1, 0u32, 0u32), 10);
        assert_eq!(tr.configs, vec![Config::new(1, 0u32, 0u32), Config::new(1, 1u32, 1u32)]);
        assert_eq!(tr.outcome, RunOutcome::Stuck);

        let inc = library::inc_forever();
        let tr = inc.run(&Config::new(1, 0u32, 0u32), 10);
        assert_eq!(tr.outcome, RunOutcome::BudgetExceeded);
        assert_eq!(tr.steps(), 10);
        // c1 + c2 grows by one or two per step, never revisiting a configuration.
        assert_eq!(tr.configs[1], Config::new(1, 1u32, 1u32));
        assert_eq!(tr.configs[2], Config::new(1, 2u32, 2u32));
    }

    #[test]
    fn budget_zero_reports_immediately() {
        let tr = library::dec1().run(&Config::new(1, 3u32, 0u32), 0);
        assert_eq!(tr.outcome, RunOutcome::BudgetExceeded);
        let tr = library::dec1().run(&Config::new(0, 3u32, 0u32), 0);
        assert_eq!(tr.outcome, RunOutcome::Halted);
    }

    #[test]
    fn dec1_counts_down() {
        let m = library::dec1();
        for k in 0..=100u32 {
            let tr = m.run(&Config::new(1, k, 0u32), 1000);
            assert_eq!(tr.outcome, RunOutcome::Halted);
            assert_eq!(tr.steps(), k as usize + 1);
            assert_eq!(tr.last(), &Config::new(0, 0u32, 0u32));
        }
    }

    #[test]
    fn bounded_acyclicity() {
        let starts: Vec<Config> = (0..=50u32).map(|k| Config::new(1, k, 0u32)).collect();
        assert!(!library::dec1().check_acyclic_bounded(&starts, 200).cycle_found());
        assert!(library::self_loop().check_acyclic_bounded(&starts[..1], 10).cycle_found());
        assert!(!library::inc_forever().check_acyclic_bounded(&starts, 200).cycle_found());
    }

    #[test]
    fn config_text() {
        let c: Config = "[2, 10,0]".parse().unwrap();
        assert_eq!(c, Config::new(2, 10u32, 0u32));
        assert_eq!(c.to_string(), "[2,10,0]");
        assert_eq!("1,0,0".parse::<Config>().unwrap().observed(), (1, 1));
        assert!("[1,2]".parse::<Config>().is_err());
        assert_eq!(serde_json::to_string(&c).unwrap(), "[2,10,0]");
    }

    impl Step {
        fn to_config(&self) -> Option<Config> {
            match self {
                Step::Moved { to, .. } => Some(to.clone()),
                _ => None,
            }
        }
    }
}
