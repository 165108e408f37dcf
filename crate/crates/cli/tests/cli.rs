use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_diffreduce"));
    // Keep the caller's environment from changing defaults.
    for (k, _) in std::env::vars() {
        if k.starts_with("DIFFREDUCE_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Workdir {
    dir: TempDir,
}

impl Workdir {
    fn new() -> Self {
        Workdir { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn machine(&self, name: &str) -> PathBuf {
        let p = self.file(&format!("{name}.json"));
        let out = run(&["machine", name, "-o", path(&p)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        p
    }

    fn compile(&self, name: &str) -> PathBuf {
        let m = self.machine(name);
        let p = self.file(&format!("{name}.gens"));
        let out = run(&["compile", path(&m), "-o", path(&p)]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        p
    }
}

#[test]
fn run_reports_halt_with_step_count() {
    let w = Workdir::new();
    let m = w.machine("dec1");
    let out = run(&["run", path(&m), "[1,3,0]"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"]["kind"], "halted");
    assert_eq!(v["steps"], 4);
    assert_eq!(v["last"], serde_json::json!([0, 0, 0]));
}

#[test]
fn run_reports_cycles_and_budget() {
    let w = Workdir::new();
    let out = run(&["run", path(&w.machine("self_loop")), "[1,0,0]"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("cycle_detected"));

    let out = run(&["run", "--max-steps", "50", path(&w.machine("inc_forever")), "[1,0,0]"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("budget_exceeded"));
}

#[test]
fn missing_or_malformed_input_exits_one() {
    let w = Workdir::new();
    let out = run(&["run", path(&w.file("nope.json")), "[1,0,0]"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("nope.json"));

    let bad = w.file("bad.json");
    std::fs::write(&bad, "{\n  \"n\": 1,\n  \"commands\": [\n    {\"i\": 1, \"eps\": 3}\n  ]\n}\n").unwrap();
    let out = run(&["run", path(&bad), "[1,0,0]"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));

    assert_eq!(code(&run(&["run"])), 1);
    assert_eq!(code(&run(&["--max-order", "0", "machine", "list"])), 1);
    assert_eq!(code(&run(&["--field", "Zp:4", "machine", "list"])), 1);
}

#[test]
fn compile_certify_verify_round_trip() {
    let w = Workdir::new();
    let gens = w.compile("dec1");
    let cert = w.file("cert.json");
    let out = run(&["certify", path(&w.file("dec1.json")), "[1,2,0]", "[0,0,0]", "-o", path(&cert)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["verify", path(&gens), path(&cert)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("accept"));

    // A certificate for another machine is rejected.
    let other = w.compile("dec_to_one");
    let out = run(&["verify", path(&other), path(&cert)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("reject"));
}

#[test]
fn certify_rejects_terminal_start_and_flags_wrong_halt() {
    let w = Workdir::new();
    let m = w.machine("dec1");
    let out = run(&["certify", path(&m), "[0,2,0]"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("usage error"));

    let out = run(&["certify", path(&m), "[1,2,0]", "[0,1,0]"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("halted at [0,0,0]"));
}

#[test]
fn oracle_reports_grading_obstruction() {
    let w = Workdir::new();
    let gens = w.compile("inc_forever");
    let out = run(&["oracle", path(&gens), "[1,2,0] -> [0,1,0]"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("certified_non_member"));
    assert!(stderr(&out).contains("grading obstruction: q0 absent"), "{}", stderr(&out));
}

#[test]
fn oracle_finds_members_and_reports_bounded_misses() {
    let w = Workdir::new();
    let gens = w.compile("dec_to_one");
    let out = run(&["oracle", path(&gens), "test:1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("\"verdict\": \"member\""));

    let gens = w.compile("dec1");
    let out = run(&["oracle", "--max-order", "4", path(&gens), "[1,2,0] -> [0,1,0]"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("not_member_within_bounds"));
}

#[test]
fn decide_combines_both_paths() {
    let w = Workdir::new();
    let gens = w.compile("even");
    let out = run(&["decide", path(&gens), "[1,4,0] -> [0,1,0]"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["overall"], "member");
    assert_eq!(v["consistent"], true);
}

#[test]
fn independence_reports_rank() {
    let w = Workdir::new();
    let out = run(&["independence", "--bound", "3", path(&w.compile("dec1"))]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rank"], v["elements"]);

    let out = run(&["independence", "--bound", "2", path(&w.compile("swap_cycle"))]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("dependence"));
}

#[test]
fn subalgebra_lift_and_verify() {
    let w = Workdir::new();
    let gens = w.compile("dec1");
    let lift = w.file("lift.json");
    let out = run(&["subalg", "lift", path(&gens), "[1,2,0] -> [0,0,0]", "-o", path(&lift)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["subalg", "verify", path(&gens), path(&lift)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    // Tampering with f breaks the lift.
    let text = std::fs::read_to_string(&lift).unwrap().replacen("q1[2,0]", "q1[3,0]", 1);
    std::fs::write(&lift, text).unwrap();
    let out = run(&["subalg", "verify", path(&gens), path(&lift)]);
    assert_eq!(code(&out), 1);

    let inc = w.compile("inc_forever");
    let out = run(&["subalg", "refute", path(&inc), "[1,2,0] -> [0,1,0]"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("certified_non_member"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let w = Workdir::new();
    let gens = w.compile("transfer");
    let args = ["oracle", path(&gens), "[1,3,1] -> [0,1,0]"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = bin().args(args).env("DIFFREDUCE_JOBS", "3").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn field_flag_and_env_apply() {
    let w = Workdir::new();
    let m = w.machine("dec1");
    let out = run(&["--field", "GF2", "compile", path(&m)]);
    assert!(stdout(&out).contains("# field: GF2"), "{}", stdout(&out));
    let out = bin().args(["compile", path(&m)]).env("DIFFREDUCE_FIELD", "Zp:5").output().unwrap();
    assert!(stdout(&out).contains("# field: Zp:5"), "{}", stdout(&out));
}
