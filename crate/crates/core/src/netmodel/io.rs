//! Line-based text formats for instances and strategies.
//!
//! Instance:
//!
//! ```text
//! dca <directed|undirected> <n> <m> <k> <R>
//! node <id> <theta> <alpha>      (n lines)
//! edge <u> <v> <w>               (m lines)
//! ```
//!
//! Strategy:
//!
//! ```text
//! alloc <id> <r>
//! realloc <attacked>
//! t <u> <v> <amount>
//! ```
//!
//! `#` starts a comment anywhere on a line. Numbers are written with the
//! shortest representation that parses back to the same value.

use std::fmt::Write;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{
    AllocationStrategy, DefendingStrategy, Edge, Instance, ModelError, NodeParams,
    ReallocationStrategy,
};
use crate::Scalar;

fn parse_err(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: FromStr>(tokens: &[&str], i: usize, line: usize, what: &str) -> Result<T, ModelError> {
    let tok = tokens
        .get(i)
        .ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from '{tok}'")))
}

fn scalar<S: Scalar>(tokens: &[&str], i: usize, line: usize, what: &str) -> Result<S, ModelError> {
    let v: f64 = field(tokens, i, line, what)?;
    S::from_f64(v).ok_or_else(|| parse_err(line, format!("{what} out of range")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>, ModelError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    if header.len() != 6 || header[0] != "dca" {
        return Err(parse_err(
            hline,
            "expected 'dca <directed|undirected> n m k R'",
        ));
    }
    let directed = match header[1] {
        "directed" => true,
        "undirected" => false,
        other => return Err(parse_err(hline, format!("unknown graph mode '{other}'"))),
    };
    let n: usize = field(&header, 2, hline, "n")?;
    let m: usize = field(&header, 3, hline, "m")?;
    let k: usize = field(&header, 4, hline, "k")?;
    let budget: S = scalar(&header, 5, hline, "R")?;

    let mut nodes: Vec<Option<NodeParams<S>>> = vec![None; n];
    let mut edges = Vec::with_capacity(m);
    for (line, tokens) in lines {
        match tokens[0] {
            "node" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected 'node <id> <theta> <alpha>'"));
                }
                let id: usize = field(&tokens, 1, line, "node id")?;
                if id >= n {
                    return Err(parse_err(line, format!("node id {id} outside [0, {n})")));
                }
                if nodes[id].is_some() {
                    return Err(parse_err(line, format!("node {id} declared twice")));
                }
                nodes[id] = Some(NodeParams {
                    theta: scalar(&tokens, 2, line, "theta")?,
                    alpha: scalar(&tokens, 3, line, "alpha")?,
                });
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected 'edge <u> <v> <w>'"));
                }
                edges.push(Edge {
                    u: field(&tokens, 1, line, "u")?,
                    v: field(&tokens, 2, line, "v")?,
                    w: scalar(&tokens, 3, line, "w")?,
                });
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }
    if edges.len() != m {
        return Err(parse_err(
            hline,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    let nodes = nodes
        .into_iter()
        .enumerate()
        .map(|(id, p)| p.ok_or_else(|| parse_err(hline, format!("node {id} missing"))))
        .collect::<Result<Vec<_>, _>>()?;
    Instance::new(nodes, edges, directed, k, budget)
}

pub fn write_instance<S: Scalar>(inst: &Instance<S>) -> String {
    let mut out = String::new();
    let mode = if inst.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    let _ = writeln!(
        out,
        "dca {mode} {} {} {} {}",
        inst.n(),
        inst.m(),
        inst.k(),
        inst.budget()
    );
    for (id, p) in inst.nodes().iter().enumerate() {
        let _ = writeln!(out, "node {id} {} {}", p.theta, p.alpha);
    }
    for e in inst.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.u, e.v, e.w);
    }
    out
}

/// Parses a strategy for an `n`-node instance. Missing `alloc` entries are
/// zero and missing `realloc` blocks mean no transfers.
pub fn parse_strategy<S: Scalar>(text: &str, n: usize) -> Result<DefendingStrategy<S>, ModelError> {
    let mut strategy = DefendingStrategy::without_reallocation(AllocationStrategy::zeros(n));
    let mut current: Option<usize> = None;
    for (line, tokens) in content_lines(text) {
        match tokens[0] {
            "alloc" => {
                if tokens.len() != 3 {
                    return Err(parse_err(line, "expected 'alloc <id> <r>'"));
                }
                let id: usize = field(&tokens, 1, line, "node id")?;
                if id >= n {
                    return Err(parse_err(line, format!("node id {id} outside [0, {n})")));
                }
                strategy.allocation.r[id] = scalar(&tokens, 2, line, "r")?;
            }
            "realloc" => {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected 'realloc <attacked>'"));
                }
                let u: usize = field(&tokens, 1, line, "attacked node")?;
                if u >= n {
                    return Err(parse_err(line, format!("node id {u} outside [0, {n})")));
                }
                current = Some(u);
            }
            "t" => {
                let u = current.ok_or_else(|| parse_err(line, "'t' before any 'realloc'"))?;
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected 't <u> <v> <amount>'"));
                }
                let from: usize = field(&tokens, 1, line, "sender")?;
                let to: usize = field(&tokens, 2, line, "receiver")?;
                let amount: S = scalar(&tokens, 3, line, "amount")?;
                strategy.reallocations[u]
                    .transfers
                    .insert((from, to), amount);
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }
    Ok(strategy)
}

pub fn write_strategy<S: Scalar>(strategy: &DefendingStrategy<S>) -> String {
    let mut out = String::new();
    for (id, r) in strategy.allocation.r.iter().enumerate() {
        let _ = writeln!(out, "alloc {id} {r}");
    }
    for t in &strategy.reallocations {
        let _ = writeln!(out, "realloc {}", t.attacked);
        for (&(from, to), amount) in &t.transfers {
            let _ = writeln!(out, "t {from} {to} {amount}");
        }
    }
    out
}

/// Writes a single reallocation block.
pub fn write_reallocation<S: Scalar>(realloc: &ReallocationStrategy<S>) -> String {
    let mut out = format!("realloc {}\n", realloc.attacked);
    for (&(from, to), amount) in &realloc.transfers {
        let _ = writeln!(out, "t {from} {to} {amount}");
    }
    out
}

pub fn load_instance<S: Scalar>(path: impl AsRef<Path>) -> Result<Instance<S>, ModelError> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

pub fn load_strategy<S: Scalar>(
    path: impl AsRef<Path>,
    n: usize,
) -> Result<DefendingStrategy<S>, ModelError> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
    parse_strategy(&text, n)
}
