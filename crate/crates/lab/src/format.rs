//! Plain-text event logs and Graphviz export.
//!
//! ```text
//! RTCN v1 n=4
//! B 0
//! R 0 1
//! B 2
//! ```
//!
//! The header gives the leaf count; then come all `n − 1` events in rank
//! order, starting with the root branching `B 0` of the single initial lineage.

use std::fmt::Write;

use rtcn_core::network::{Event, EventLog, Network, NodeKind};

const MAGIC: &str = "RTCN v1";
const ROOT: &str = "B 0";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

pub fn serialize(log: &EventLog) -> String {
    let mut out = format!("{MAGIC} n={}\n{ROOT}\n", log.leaves());
    for ev in log.events() {
        writeln!(out, "{ev}").expect("write to string");
    }
    out
}

pub fn parse(text: &str) -> Result<EventLog, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let leaves: usize = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.trim().strip_prefix("n="))
        .ok_or_else(|| err(1, format!("expected `{MAGIC} n=<leaves>`")))?
        .parse()
        .map_err(|_| err(1, "leaf count is not a number"))?;
    if leaves < 2 {
        return Err(err(1, "a network needs at least 2 leaves"));
    }
    let mut events = Vec::with_capacity(leaves - 2);
    let mut root = false;
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !root {
            if fields != ["B", "0"] {
                return Err(err(
                    no,
                    format!("the first event must be the root branching `{ROOT}`"),
                ));
            }
            root = true;
            continue;
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(no, format!("`{s}` is not a position")))
        };
        let ev = match fields.as_slice() {
            ["B", i] => Event::Branch(num(i)?),
            ["R", i, j] => Event::Retic(num(i)?, num(j)?),
            _ => {
                return Err(err(
                    no,
                    format!("expected `B <i>` or `R <i> <j>`, got `{line}`"),
                ))
            }
        };
        ev.check(events.len() + 2)
            .map_err(|e| err(no, e.to_string()))?;
        events.push(ev);
    }
    if !root {
        return Err(err(1, format!("missing the root branching `{ROOT}`")));
    }
    if events.len() + 2 != leaves {
        return Err(err(
            1,
            format!(
                "header says {leaves} leaves but {} events follow",
                events.len()
            ),
        ));
    }
    Ok(EventLog::from_events(events).expect("events checked while parsing"))
}

/// Graphviz rendering; internal nodes carry their event rank.
pub fn to_dot(net: &Network) -> String {
    let dag = net.dag();
    let mut out = String::from("digraph rtcn {\n  node [fontname=\"Helvetica\"];\n");
    let mut leaf = 0;
    for (i, node) in dag.nodes.iter().enumerate() {
        let (label, shape) = match node.kind {
            NodeKind::Root => ("root".to_string(), "point"),
            NodeKind::Tree => (format!("t{}", node.rank.unwrap_or(0)), "circle"),
            NodeKind::Reticulation => (format!("r{}", node.rank.unwrap_or(0)), "box"),
            NodeKind::Leaf => {
                leaf += 1;
                (format!("{leaf}"), "plaintext")
            }
        };
        writeln!(out, "  v{i} [label=\"{label}\", shape={shape}];").expect("write to string");
    }
    for (a, b) in &dag.edges {
        writeln!(out, "  v{a} -> v{b};").expect("write to string");
    }
    out.push_str("}\n");
    out
}
