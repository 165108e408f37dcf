use serde::Deserialize;
use serde_json::value::RawValue;

use super::{Command, Machine};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMachine<'a> {
    n: u32,
    #[serde(borrow)]
    commands: Vec<&'a RawValue>,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Parses a machine file. Every rejection carries the 1-based line of the
/// offending command (or of the JSON syntax error).
pub fn load_machine(src: &str) -> Result<Machine> {
    let file_err = |line, msg: String| Error::MachineFile { line, msg };
    let raw: RawMachine<'_> = serde_json::from_str(src).map_err(|e| file_err(e.line().max(1), e.to_string()))?;
    let mut machine = Machine::new(raw.n, [])?;
    for value in raw.commands {
        let text = value.get();
        // RawValue borrows from `src`, so its address locates it in the file.
        let offset = text.as_ptr() as usize - src.as_ptr() as usize;
        let line = line_of(src, offset);
        let cmd: Command = serde_json::from_str(text).map_err(|e| file_err(line + e.line() - 1, e.to_string()))?;
        cmd.validate(Some(raw.n)).map_err(|e| file_err(line, strip_kind(e)))?;
        if let Some(prev) = machine.table.get(&cmd.key()) {
            return Err(file_err(line, format!("duplicate key (q{}, {}, {}): {prev} and {cmd}", cmd.i, cmd.eps, cmd.sigma)));
        }
        machine.table.insert(cmd.key(), cmd);
    }
    Ok(machine)
}

fn strip_kind(e: Error) -> String {
    match e {
        Error::Validation(m) => m,
        other => other.to_string(),
    }
}

/// Serializes with one command per line, in key order.
pub fn machine_to_json(m: &Machine) -> String {
    let mut out = format!("{{\n  \"n\": {},\n  \"commands\": [", m.n);
    for (k, c) in m.commands().enumerate() {
        out.push_str(if k == 0 { "\n    " } else { ",\n    " });
        out.push_str(&serde_json::to_string(c).expect("command serializes"));
    }
    out.push_str(if m.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minsky::library;

    #[test]
    fn round_trip() {
        for e in library::all() {
            let text = machine_to_json(&e.machine);
            let back = load_machine(&text).unwrap();
            assert_eq!(back, e.machine, "{}", e.name);
            assert_eq!(machine_to_json(&back), text);
        }
        assert_eq!(load_machine(r#"{"n":0,"commands":[]}"#).unwrap().len(), 0);
    }

    fn line_of_error(src: &str) -> usize {
        match load_machine(src) {
            Err(Error::MachineFile { line, .. }) => line,
            other => panic!("expected machine-file error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_point_at_line() {
        let src = "{\n \"n\": 1,\n \"commands\": [\n  {\"i\":1,\"eps\":0,\"sigma\":1,\"j\":1,\"alpha\":-1,\"beta\":0},\n  {\"i\":1,\"eps\":1,\"sigma\":1,\"j\":0,\"alpha\":-1,\"beta\":0}\n ]\n}";
        assert_eq!(line_of_error(src), 5);
        let dup = "{\"n\":1,\"commands\":[\n{\"i\":1,\"eps\":1,\"sigma\":1,\"j\":0,\"alpha\":0,\"beta\":0},\n\n{\"i\":1,\"eps\":1,\"sigma\":1,\"j\":1,\"alpha\":0,\"beta\":0}]}";
        assert_eq!(line_of_error(dup), 4);
        let range = "{\"n\":1,\"commands\":[\n{\"i\":1,\"eps\":1,\"sigma\":1,\"j\":2,\"alpha\":0,\"beta\":0}]}";
        assert_eq!(line_of_error(range), 2);
        let unknown = "{\"n\":1,\"commands\":[\n\n{\"i\":1,\"eps\":1,\"sigma\":1,\"j\":0,\"alpha\":0,\"beta\":0,\"x\":3}]}";
        assert_eq!(line_of_error(unknown), 3);
        assert_eq!(line_of_error("{\"n\":1,\n\"commands\": [ }"), 2);
        assert_eq!(line_of_error("{\"n\":1,\"commands\":[\n{\"i\":1,\"eps\":2,\"sigma\":1,\"j\":0,\"alpha\":0,\"beta\":0}]}"), 2);
    }
}
