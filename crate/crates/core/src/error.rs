use thiserror::Error;

use crate::lpkit::{LpError, SolveStatus};
use crate::netmodel::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DcaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    /// The solver stopped before proving optimality.
    #[error("solver stopped with {status:?} (gap {gap})")]
    SolverLimit { status: SolveStatus, gap: f64 },
    #[error("unexpected solver status {0:?}")]
    UnexpectedStatus(SolveStatus),
    #[error("refused: {0}")]
    Refused(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
