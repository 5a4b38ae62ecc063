//! Linear and mixed-binary programming.
//!
//! Programs are always minimisation problems over bounded variables:
//!
//! ```text
//! minimize    c^T x + offset
//! subject to  a_i^T x (<=|>=|=) b_i
//!             l <= x <= u
//!             x_j in {0,1}   for binary j
//! ```
//!
//! [`solve_lp`] runs a two-phase bounded-variable primal simplex with a dense
//! explicit basis inverse. [`solve_mip`] is best-bound branch-and-bound on the
//! binary variables. [`check_feasibility`] fixes every binary and runs phase 1
//! only.

mod lpfile;
mod mip;
mod simplex;

use std::fmt;

use thiserror::Error;

use crate::Scalar;

pub use lpfile::write_lp_format;
pub use mip::{check_feasibility, check_feasibility_with, solve_mip, solve_mip_with};
pub use simplex::{solve_lp, solve_lp_with};

pub type VarId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("variable {index} has lower bound {lower} above upper bound {upper}")]
    InvalidBounds {
        index: usize,
        lower: f64,
        upper: f64,
    },
    #[error("binary variable {index} has bounds outside [0, 1]")]
    BinaryBounds { index: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("constraint {row} references unknown variable {var}")]
    UnknownVariable { row: usize, var: usize },
    #[error("binary variable {0} is not covered by the fixed assignment")]
    MissingFixing(usize),
    #[error("variable {0} in the fixed assignment is not binary")]
    NotBinary(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<S> {
    pub lower: S,
    pub upper: S,
    pub binary: bool,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<(VarId, S)>,
    pub relation: Relation,
    pub rhs: S,
    pub name: String,
}

impl<S: Scalar> Constraint<S> {
    pub fn activity(&self, x: &[S]) -> S {
        self.coeffs
            .iter()
            .fold(S::zero(), |acc, &(j, a)| acc + a * x[j])
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[S]) -> S {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(S::zero()),
            Relation::Ge => (self.rhs - lhs).max(S::zero()),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A minimisation program with bounded (possibly infinite) variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub vars: Vec<Variable<S>>,
    pub constraints: Vec<Constraint<S>>,
    pub objective: Vec<(VarId, S)>,
    pub objective_offset: S,
}

impl<S: Scalar> Default for LinearProgram<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        Self {
            vars: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            objective_offset: S::zero(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: S, upper: S) -> VarId {
        self.vars.push(Variable {
            lower,
            upper,
            binary: false,
            name: name.into(),
        });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(Variable {
            lower: S::zero(),
            upper: S::one(),
            binary: true,
            name: name.into(),
        });
        self.vars.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, S)>,
        relation: Relation,
        rhs: S,
    ) -> usize {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
            name: name.into(),
        });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, coeffs: Vec<(VarId, S)>, offset: S) {
        self.objective = coeffs;
        self.objective_offset = offset;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.binary).count()
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.binary)
            .map(|(j, _)| j)
    }

    /// Copy with every binary flag dropped (bounds stay within [0,1]).
    pub fn relaxed(&self) -> Self {
        let mut lp = self.clone();
        for v in &mut lp.vars {
            v.binary = false;
        }
        lp
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.objective
            .iter()
            .fold(self.objective_offset, |acc, &(j, c)| acc + c * x[j])
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[S]) -> S {
        let mut worst = S::zero();
        for (v, &xj) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xj).max(xj - v.upper);
        }
        for c in &self.constraints {
            worst = worst.max(c.violation(x));
        }
        worst
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.vars.len();
        for (j, v) in self.vars.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(LpError::InvalidBounds {
                    index: j,
                    lower: v.lower.as_f64(),
                    upper: v.upper.as_f64(),
                });
            }
            if v.binary && (v.lower < S::zero() || v.upper > S::one()) {
                return Err(LpError::BinaryBounds { index: j });
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::NonFinite(format!("rhs of row {i}")));
            }
            for &(j, a) in &c.coeffs {
                if j >= n {
                    return Err(LpError::UnknownVariable { row: i, var: j });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite(format!("row {i}")));
                }
            }
        }
        for &(j, c) in &self.objective {
            if j >= n {
                return Err(LpError::UnknownVariable {
                    row: usize::MAX,
                    var: j,
                });
            }
            if !c.is_finite() {
                return Err(LpError::NonFinite("objective".into()));
            }
        }
        if !self.objective_offset.is_finite() {
            return Err(LpError::NonFinite("objective offset".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot limit hit; the assignment is not trustworthy.
    IterLimit,
    /// Branch-and-bound node limit hit; `x` holds the incumbent (if any) and
    /// `gap` the distance to the best open bound.
    NodeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<S> {
    pub status: SolveStatus,
    pub objective: S,
    pub x: Vec<S>,
    /// Incumbent minus best remaining bound; zero for proven optima.
    pub gap: S,
    pub pivots: usize,
    pub nodes: usize,
}

impl<S: Scalar> SolveResult<S> {
    pub(crate) fn without_point(status: SolveStatus, pivots: usize) -> Self {
        Self {
            status,
            objective: S::nan(),
            x: Vec::new(),
            gap: S::infinity(),
            pivots,
            nodes: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn has_point(&self) -> bool {
        !self.x.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_pivots: usize,
    pub max_nodes: usize,
    pub refactor_every: usize,
    /// When the optimum of every subproblem (binaries fixed) is known to be a
    /// multiple of this step, branch-and-bound prunes nodes that cannot
    /// improve on the incumbent by a full step.
    pub objective_step: Option<f64>,
    /// Branch-and-bound only looks for points strictly below this value and
    /// reports `Infeasible` when there are none.
    pub cutoff: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_pivots: 1_000_000,
            max_nodes: 1_000_000,
            refactor_every: 100,
            objective_step: None,
            cutoff: None,
        }
    }
}
