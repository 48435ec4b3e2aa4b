//! The line-oriented machine format:
//!
//! ```text
//! # comment
//! inputs: a b
//! propositions: p q
//! initial: l0
//! l0 --a/{p q}--> l1
//! l0 --b/{}--> l0
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{MachineError, MealyMachine};
use crate::formula::PropSet;

struct Row {
    line: usize,
    src: String,
    input: String,
    out: PropSet,
    dst: String,
}

fn perr(line: usize, message: impl Into<String>) -> MachineError {
    MachineError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_row(line: usize, text: &str) -> Result<Row, MachineError> {
    let (src, rest) = text
        .split_once("--")
        .ok_or_else(|| perr(line, "expected `src --input/{...}--> dst`"))?;
    let (input, rest) = rest
        .split_once('/')
        .ok_or_else(|| perr(line, "missing `/` after input"))?;
    let rest = rest.trim_start();
    let rest = rest
        .strip_prefix('{')
        .ok_or_else(|| perr(line, "missing `{` before output"))?;
    let (out, rest) = rest
        .split_once('}')
        .ok_or_else(|| perr(line, "missing `}` after output"))?;
    let dst = rest
        .trim_start()
        .strip_prefix("-->")
        .ok_or_else(|| perr(line, "missing `-->`"))?;
    let (src, input, dst) = (src.trim(), input.trim(), dst.trim());
    for (what, v) in [("source", src), ("input", input), ("target", dst)] {
        if v.is_empty() || v.contains(char::is_whitespace) {
            return Err(perr(line, format!("malformed {what} `{v}`")));
        }
    }
    Ok(Row {
        line,
        src: src.into(),
        input: input.into(),
        out: out.split_whitespace().map(String::from).collect(),
        dst: dst.into(),
    })
}

/// Parses a machine; locations are numbered in order of first appearance,
/// starting with the initial one.
pub fn load_machine(text: &str) -> Result<MealyMachine, MachineError> {
    let mut inputs: Option<Vec<String>> = None;
    let mut props: Option<BTreeSet<String>> = None;
    let mut initial: Option<String> = None;
    let mut rows = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(v) = body.strip_prefix("inputs:") {
            inputs = Some(v.split_whitespace().map(String::from).collect());
        } else if let Some(v) = body.strip_prefix("propositions:") {
            props = Some(v.split_whitespace().map(String::from).collect());
        } else if let Some(v) = body.strip_prefix("initial:") {
            let v = v.trim();
            if v.is_empty() || v.contains(char::is_whitespace) {
                return Err(perr(line, "expected one initial location"));
            }
            initial = Some(v.into());
        } else {
            rows.push(parse_row(line, body)?);
        }
    }
    let inputs = inputs.ok_or_else(|| perr(0, "missing `inputs:` header"))?;
    let props = props.unwrap_or_default();
    let initial = initial.ok_or_else(|| perr(0, "missing `initial:` header"))?;
    let mut seen_inputs = BTreeSet::new();
    if let Some(dup) = inputs.iter().find(|a| !seen_inputs.insert(*a)) {
        return Err(perr(0, format!("duplicate input `{dup}`")));
    }

    let mut loc_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut locations = Vec::new();
    let mut intern = |name: &str| -> usize {
        *loc_ids.entry(name.to_string()).or_insert_with(|| {
            locations.push(name.to_string());
            locations.len() - 1
        })
    };
    intern(&initial);
    for r in &rows {
        intern(&r.src);
        intern(&r.dst);
    }
    let mut cells: Vec<Vec<Option<(usize, PropSet)>>> =
        vec![vec![None; inputs.len()]; locations.len()];
    let mut has_rows = vec![false; locations.len()];
    for r in rows {
        let a = inputs
            .iter()
            .position(|i| *i == r.input)
            .ok_or_else(|| perr(r.line, format!("unknown input `{}`", r.input)))?;
        let (s, d) = (loc_ids[&r.src], loc_ids[&r.dst]);
        if let Some(p) = r.out.iter().find(|p| !props.contains(*p)) {
            return Err(perr(r.line, format!("undeclared proposition `{p}`")));
        }
        if cells[s][a].is_some() {
            return Err(perr(
                r.line,
                format!("duplicate transition from `{}` on `{}`", r.src, r.input),
            ));
        }
        cells[s][a] = Some((d, r.out));
        has_rows[s] = true;
    }
    let mut table = Vec::with_capacity(locations.len());
    for (l, row) in cells.into_iter().enumerate() {
        if !has_rows[l] {
            return Err(MachineError::DanglingLocation(locations[l].clone()));
        }
        let mut full = Vec::with_capacity(inputs.len());
        for (a, c) in row.into_iter().enumerate() {
            full.push(c.ok_or_else(|| MachineError::NotTotal {
                location: locations[l].clone(),
                input: inputs[a].clone(),
            })?);
        }
        table.push(full);
    }
    MealyMachine::new(inputs, props, locations, 0, table)
}

/// Serializes a machine, listing transitions by location then input order.
pub fn save_machine(m: &MealyMachine) -> String {
    let mut s = String::new();
    let join = |v: &mut dyn Iterator<Item = &String>| v.cloned().collect::<Vec<_>>().join(" ");
    writeln!(s, "inputs: {}", join(&mut m.inputs().iter())).unwrap();
    writeln!(s, "propositions: {}", join(&mut m.propositions().iter())).unwrap();
    writeln!(s, "initial: {}", m.locations()[m.initial()]).unwrap();
    let mut order = vec![m.initial()];
    order.extend((0..m.num_locations()).filter(|&l| l != m.initial()));
    for l in order {
        for (a, input) in m.inputs().iter().enumerate() {
            let (t, out) = m.step(l, a);
            writeln!(
                s,
                "{} --{}/{{{}}}--> {}",
                m.locations()[l],
                input,
                join(&mut out.iter()),
                m.locations()[t]
            )
            .unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = "\
inputs: a b
propositions: p q
initial: l0
l0 --a/{p}--> l1
l0 --b/{}--> l0
l1 --a/{p q}--> l2
l1 --b/{q}--> l0
l2 --a/{}--> l2
l2 --b/{p}--> l1
";

    #[test]
    fn round_trip() {
        let m = load_machine(THREE).unwrap();
        assert_eq!(save_machine(&m), THREE);
        assert_eq!(load_machine(&save_machine(&m)).unwrap(), m);
    }

    #[test]
    fn comments_and_spacing() {
        let text =
            "# demo\ninputs: a\n\npropositions: p # trailing\ninitial: s\n  s --a/{ p }-->  s  \n";
        let m = load_machine(text).unwrap();
        assert_eq!(m.num_locations(), 1);
        assert_eq!(m.locations(), ["s"]);
    }

    #[test]
    fn missing_row_is_not_total() {
        let text = THREE.replace("l2 --b/{p}--> l1\n", "");
        assert_eq!(
            load_machine(&text),
            Err(MachineError::NotTotal {
                location: "l2".into(),
                input: "b".into()
            })
        );
    }

    #[test]
    fn dangling_target() {
        let text = THREE.replace("l2 --b/{p}--> l1", "l2 --b/{p}--> l9");
        assert_eq!(
            load_machine(&text),
            Err(MachineError::DanglingLocation("l9".into()))
        );
    }

    #[test]
    fn parse_errors() {
        for (text, line) in [
            ("inputs: a\ninitial: l0\nl0 -a/{}--> l0\n", 3),
            ("inputs: a\ninitial: l0\nl0 --c/{}--> l0\n", 3),
            ("inputs: a\ninitial: l0\nl0 --a/{p}--> l0\n", 3),
            (
                "inputs: a\ninitial: l0\nl0 --a/{}--> l0\nl0 --a/{}--> l0\n",
                4,
            ),
        ] {
            match load_machine(text) {
                Err(MachineError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            load_machine("initial: l0\n"),
            Err(MachineError::Parse { .. })
        ));
    }
}
