//! Hand-built example machines.

use super::{Command, Machine};

fn build(n: u32, cmds: &[(u32, u8, u8, u32, i8, i8)]) -> Machine {
    let cmds = cmds.iter().map(|&(i, e, s, j, a, b)| Command::new(i, e, s, j, a, b).expect("library command"));
    Machine::new(n, cmds).expect("library machine")
}

/// `q1 1 1 → q0 T0 T0`.
pub fn single() -> Machine {
    build(1, &[(1, 1, 1, 0, 0, 0)])
}

/// Counts the first counter down to zero, then halts at `[0,0,0]`.
/// From `[1,k,0]` it takes `k + 1` steps.
pub fn dec1() -> Machine {
    build(1, &[(1, 0, 1, 1, -1, 0), (1, 1, 1, 0, 0, 0)])
}

/// Like [`dec1`] but halts at `[0,1,0]`.
pub fn dec_to_one() -> Machine {
    build(1, &[(1, 0, 1, 1, -1, 0), (1, 1, 1, 0, 1, 0)])
}

/// From `[1,k,0]`: halts at `[0,1,0]` iff `k` is even; otherwise moves to
/// `q3`, which increments the first counter forever.
pub fn even() -> Machine {
    build(
        3,
        &[(1, 0, 1, 2, -1, 0), (2, 0, 1, 1, -1, 0), (1, 1, 1, 0, 1, 0), (2, 1, 1, 3, 1, 0), (3, 0, 1, 3, 1, 0)],
    )
}

/// Moves the first counter onto the second, then drains the second and halts
/// at `[0,1,0]`. Uses all four observed-symbol combinations.
pub fn transfer() -> Machine {
    build(
        2,
        &[(1, 0, 1, 1, -1, 1), (1, 0, 0, 1, -1, 1), (1, 1, 0, 2, 0, 0), (1, 1, 1, 0, 1, 0), (2, 1, 0, 2, 0, -1), (2, 1, 1, 0, 1, 0)],
    )
}

/// Total table on one state; `c1 + c2` strictly grows, so it never halts
/// and never cycles.
pub fn inc_forever() -> Machine {
    build(1, &[(1, 1, 1, 1, 1, 1), (1, 0, 0, 1, 1, 1), (1, 0, 1, 1, 1, 0), (1, 1, 0, 1, 0, 1)])
}

/// `[1,0,0] → [2,1,0] → [1,0,0]`.
pub fn swap_cycle() -> Machine {
    build(2, &[(1, 1, 1, 2, 1, 0), (2, 0, 1, 1, -1, 0)])
}

/// `q1 1 1 → q1 T0 T0`: every configuration `[1,0,0]` is a fixed point.
pub fn self_loop() -> Machine {
    build(1, &[(1, 1, 1, 1, 0, 0)])
}

pub struct Entry {
    pub name: &'static str,
    pub machine: Machine,
    /// No configuration (reachable or not) ever repeats.
    pub acyclic: bool,
}

pub fn all() -> Vec<Entry> {
    let e = |name, machine, acyclic| Entry { name, machine, acyclic };
    vec![
        e("single", single(), true),
        e("dec1", dec1(), true),
        e("dec_to_one", dec_to_one(), true),
        e("even", even(), true),
        e("transfer", transfer(), true),
        e("inc_forever", inc_forever(), true),
        e("swap_cycle", swap_cycle(), false),
        e("self_loop", self_loop(), false),
    ]
}

pub fn by_name(name: &str) -> Option<Machine> {
    all().into_iter().find(|e| e.name == name).map(|e| e.machine)
}
