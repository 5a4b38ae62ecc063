//! One-way export to the CPLEX LP text format, for cross-checking programs
//! with external solvers.

use std::fmt::Write;

use super::{LinearProgram, Relation};
use crate::Scalar;

fn sanitize(name: &str, fallback: &str, index: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.()[]".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    match cleaned.chars().next() {
        Some(c) if !c.is_ascii_digit() && c != '.' => format!("{cleaned}_{index}"),
        _ => format!("{fallback}{index}"),
    }
}

fn write_terms<S: Scalar>(out: &mut String, terms: &[(usize, S)], names: &[String]) {
    if terms.is_empty() {
        out.push_str(" 0 ");
        out.push_str(&names.first().cloned().unwrap_or_default());
        return;
    }
    for (pos, &(j, c)) in terms.iter().enumerate() {
        let sign = if c < S::zero() { "-" } else { "+" };
        if pos == 0 && sign == "+" {
            let _ = write!(out, " {} {}", c.abs(), names[j]);
        } else {
            let _ = write!(out, " {} {} {}", sign, c.abs(), names[j]);
        }
    }
}

/// Renders `lp` in LP format. Variable and row names are sanitised and made
/// unique by suffixing their index.
pub fn write_lp_format<S: Scalar>(lp: &LinearProgram<S>) -> String {
    let names: Vec<String> = lp
        .vars
        .iter()
        .enumerate()
        .map(|(j, v)| sanitize(&v.name, "x", j))
        .collect();
    let mut out = String::new();
    out.push_str("\\ exported by dca-core\nMinimize\n obj:");
    if lp.objective.is_empty() && names.is_empty() {
        out.push_str(" 0");
    } else {
        write_terms(&mut out, &lp.objective, &names);
    }
    if lp.objective_offset != S::zero() {
        let sign = if lp.objective_offset < S::zero() {
            "-"
        } else {
            "+"
        };
        let _ = write!(out, " {} {}", sign, lp.objective_offset.abs());
    }
    out.push_str("\nSubject To\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let _ = write!(out, " {}:", sanitize(&c.name, "c", i));
        write_terms(&mut out, &c.coeffs, &names);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {} {}", rel, c.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in lp.vars.iter().zip(&names) {
        if v.binary {
            continue;
        }
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {name} free");
            }
            (true, true) if v.lower == v.upper => {
                let _ = writeln!(out, " {name} = {}", v.lower);
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= {name} <= {}", v.lower, v.upper);
            }
            (true, false) => {
                let _ = writeln!(out, " {name} >= {}", v.lower);
            }
            (false, true) => {
                let _ = writeln!(out, " -inf <= {name} <= {}", v.upper);
            }
        }
    }
    let binaries: Vec<&String> = lp
        .vars
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for n in binaries {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}
