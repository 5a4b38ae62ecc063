//! Instance generators, brute-force oracles and the experiment runner.

mod generate;
mod oracle;
mod suite;

pub use generate::{gen_gnp, gen_powerlaw, gen_vc_gadget, GenParams};
pub use oracle::{
    oracle_exact, oracle_exact_exhaustive, oracle_reallocation, oracle_single_threshold,
    single_threshold_result, MAX_EXHAUSTIVE_DECISIONS, MAX_ORACLE_DECISIONS, MAX_REGION,
};
pub use suite::{
    min_perfect_budget, run_algorithm, run_on, run_suite, verify_report, Algorithm, InstanceSource,
    SuiteConfig, SuiteReport, SuiteRow, PERFECT_BUDGET, PERFECT_BUDGET_ISOLATED,
};
