//! Full defending strategies: the exact MILP with pruning, the perfect-defense
//! check, bi-criteria roundings and greedy baselines.

mod approx;
mod exact;
mod greedy;
mod program;

pub use approx::{
    ba_epsilon, ba_epsilon_tau, ba_epsilon_tau_with, ba_epsilon_with, ba_grid, tau_grid, BaSolution,
};
pub use exact::{
    lp_lower_bound, perfect_defense, perfect_defense_with, prune, solve_exact, solve_exact_with,
    ExactSolution, PerfectDefense,
};
pub use greedy::{greedy, greedy_r};
pub use program::{
    build_defense_milp, build_defense_milp_with, BuildOptions, DefenseProgram, Scenario,
};

use crate::error::DcaError;
use crate::lpkit::SolverOptions;

#[derive(Debug, Clone)]
pub struct PlannerConfig {
    /// Reduced-budget fractions tried by the grid search.
    pub epsilons: Vec<f64>,
    /// Number of evenly spaced thresholds in `(0, eps]` per epsilon.
    pub tau_points: usize,
    /// Drop scenarios that cannot exceed the LP lower bound.
    pub prune_scenarios: bool,
    /// Drop rows dominated by the other transfer-cap family.
    pub dominance: bool,
    pub solver: SolverOptions,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            epsilons: (1..=9).map(|i| i as f64 / 10.0).collect(),
            tau_points: 20,
            prune_scenarios: true,
            dominance: true,
            solver: SolverOptions::default(),
        }
    }
}

impl PlannerConfig {
    /// No pruning of any kind.
    pub fn unpruned() -> Self {
        Self {
            prune_scenarios: false,
            dominance: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DcaError> {
        if self.epsilons.is_empty() {
            return Err(DcaError::Config("empty epsilon grid".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(DcaError::Config(format!("epsilon {e} outside (0, 1)")));
        }
        if self.tau_points == 0 {
            return Err(DcaError::Config("tau grid needs at least one point".into()));
        }
        Ok(())
    }
}
