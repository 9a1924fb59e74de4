//! Plain-text formats for graphs and set-cover instances.
//!
//! Graph files start with `n <N>` followed by one `<owner> <target>` line per
//! edge. Set-cover files start with `u <n> q <q>` followed by one set per
//! line. In both, lines starting with `#` and blank lines are ignored.

use std::fmt::Write as _;

use crate::constructions::SetCoverInstance;
use crate::error::{Error, Result};
use crate::graph::{Node, OwnedGraph};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_number(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<OwnedGraph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `n <N>` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let n = match toks.as_slice() {
        ["n", count] => parse_number(hl, count, "a node count")?,
        _ => {
            return Err(parse_err(
                hl,
                format!("expected `n <N>` header, found `{header}`"),
            ))
        }
    };
    let mut g = OwnedGraph::new(n);
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = toks.as_slice() else {
            return Err(parse_err(
                ln,
                format!("expected `<owner> <target>`, found `{line}`"),
            ));
        };
        let owner = parse_number(ln, a, "a node id")?;
        let target = parse_number(ln, b, "a node id")?;
        g.add_edge(owner, target)
            .map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(g)
}

/// Header plus owned edges sorted by (owner, target).
pub fn serialize_graph(g: &OwnedGraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (o, t) in g.owned_edges() {
        let _ = writeln!(out, "{o} {t}");
    }
    out
}

pub fn read_graph(path: &std::path::Path) -> Result<OwnedGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_err(0, format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn parse_set_cover(text: &str) -> Result<SetCoverInstance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `u <n> q <q>` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, q) = match toks.as_slice() {
        ["u", n, "q", q] => (
            parse_number(hl, n, "a universe size")?,
            parse_number(hl, q, "a set size")?,
        ),
        _ => {
            return Err(parse_err(
                hl,
                format!("expected `u <n> q <q>` header, found `{header}`"),
            ))
        }
    };
    let mut sets = Vec::new();
    for (ln, line) in lines {
        let set = line
            .split_whitespace()
            .map(|t| parse_number(ln, t, "an element id"))
            .collect::<Result<Vec<Node>>>()?;
        if set.len() != q {
            return Err(parse_err(
                ln,
                format!("set has {} elements, expected {q}", set.len()),
            ));
        }
        sets.push(set);
    }
    SetCoverInstance::new(n, q, sets)
}

pub fn serialize_set_cover(inst: &SetCoverInstance) -> String {
    let mut out = format!("u {} q {}\n", inst.universe_size, inst.q);
    for set in &inst.sets {
        let line: Vec<String> = set.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
