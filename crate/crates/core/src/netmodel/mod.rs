//! Network model: instances, strategies and the loss semantics every solver
//! in the crate is checked against.

mod eval;
mod instance;
pub mod io;
mod strategy;

use thiserror::Error;

pub use eval::{defending_power, evaluate, is_defended, loss_of_attack};
pub use instance::{Edge, Instance, NodeParams};
pub use strategy::{AllocationStrategy, DefendingStrategy, DefenseOutcome, ReallocationStrategy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("node {0} does not exist")]
    InvalidNode(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("reallocation for attack {found} used where attack {expected} was expected")]
    AttackMismatch { expected: usize, found: usize },
    #[error("infeasible strategy: {}", .0.join("; "))]
    Infeasible(Vec<String>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}
