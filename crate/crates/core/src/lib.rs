//! Defending critical assets against attacks that spread over a network.
//!
//! A defender allocates a resource budget to nodes before an attack and may
//! move resource between neighbours after seeing which node was hit. The
//! crate covers the model itself, a small LP/MILP engine, the per-attack
//! reallocation problem, full strategy planners and an experiment harness.

mod error;
pub mod harness;
pub mod lpkit;
pub mod netmodel;
pub mod planner;
pub mod realloc;
mod scalar;

pub use error::DcaError;
pub use scalar::Scalar;

pub type Instance = netmodel::Instance<f64>;
pub type AllocationStrategy = netmodel::AllocationStrategy<f64>;
pub type ReallocationStrategy = netmodel::ReallocationStrategy<f64>;
pub type DefendingStrategy = netmodel::DefendingStrategy<f64>;
pub type LinearProgram = lpkit::LinearProgram<f64>;
pub type SolveResult = lpkit::SolveResult<f64>;
