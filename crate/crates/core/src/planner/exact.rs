use super::greedy::greedy;
use super::program::{build_defense_milp, build_defense_milp_with, BuildOptions, DefenseProgram};
use super::PlannerConfig;
use crate::error::DcaError;
use crate::lpkit::{self, SolveStatus, VarId};
use crate::netmodel::{evaluate, DefendingStrategy, Instance};
use crate::Scalar;

#[derive(Debug, Clone)]
pub struct ExactSolution<S> {
    pub strategy: DefendingStrategy<S>,
    /// Defending result of `strategy` as evaluated by the model.
    pub result: S,
    /// Optimal MILP objective.
    pub objective: S,
    /// LP bound used for scenario pruning, if any.
    pub lower_bound: Option<S>,
    pub num_vars: usize,
    pub num_constraints: usize,
    pub nodes: usize,
}

/// Optimum of the relaxation at the instance budget; never above the
/// optimal defending result.
pub fn lp_lower_bound<S: Scalar>(inst: &Instance<S>) -> Result<S, DcaError> {
    let program = build_defense_milp(inst, inst.budget())?;
    relaxation_bound(&program)
}

fn relaxation_bound<S: Scalar>(program: &DefenseProgram<S>) -> Result<S, DcaError> {
    let res = lpkit::solve_lp(&program.lp.relaxed())?;
    match res.status {
        SolveStatus::Optimal => Ok(res.objective),
        other => Err(DcaError::UnexpectedStatus(other)),
    }
}

/// Rebuilds `program` without the scenarios whose region is worth at most
/// `lower_bound`, and without dominated rows. `lower_bound` must not exceed
/// the optimum; it is checked against the greedy result, a cheap upper bound.
pub fn prune<S: Scalar>(
    program: &DefenseProgram<S>,
    inst: &Instance<S>,
    lower_bound: S,
) -> Result<DefenseProgram<S>, DcaError> {
    let at_budget = inst.with_budget(program.budget)?;
    let upper = evaluate(&at_budget, &greedy(&at_budget))?.defending_result;
    if lower_bound > upper + S::feas_tol() {
        return Err(DcaError::Refused(format!(
            "lower bound {lower_bound} exceeds the known upper bound {upper}"
        )));
    }
    build_defense_milp_with(
        inst,
        program.budget,
        BuildOptions {
            lower_bound: Some(lower_bound),
            dominance: true,
        },
    )
}

pub fn solve_exact<S: Scalar>(inst: &Instance<S>) -> Result<ExactSolution<S>, DcaError> {
    solve_exact_with(inst, &PlannerConfig::default())
}

pub fn solve_exact_with<S: Scalar>(
    inst: &Instance<S>,
    cfg: &PlannerConfig,
) -> Result<ExactSolution<S>, DcaError> {
    let base = build_defense_milp_with(
        inst,
        inst.budget(),
        BuildOptions {
            lower_bound: None,
            dominance: cfg.dominance,
        },
    )?;
    // integral values make every achievable loss an integer
    let integral = (0..inst.n()).all(|v| inst.alpha(v) == inst.alpha(v).round());
    let (program, lower_bound) = if cfg.prune_scenarios {
        let mut l = relaxation_bound(&base)?;
        if integral {
            l = (l - S::lit(1e-6)).ceil().max(S::zero());
        }
        (prune(&base, inst, l)?, Some(l))
    } else {
        (base, None)
    };
    let mut cfg = cfg.clone();
    if integral {
        cfg.solver.objective_step = Some(1.0);
    }
    solve_program(inst, &program, &cfg, lower_bound)
}

pub(crate) fn solve_program<S: Scalar>(
    inst: &Instance<S>,
    program: &DefenseProgram<S>,
    cfg: &PlannerConfig,
    lower_bound: Option<S>,
) -> Result<ExactSolution<S>, DcaError> {
    let res = lpkit::solve_mip_with(&program.lp, &cfg.solver)?;
    match res.status {
        SolveStatus::Optimal => {}
        SolveStatus::NodeLimit | SolveStatus::IterLimit => {
            return Err(DcaError::SolverLimit {
                status: res.status,
                gap: res.gap.as_f64(),
            })
        }
        other => return Err(DcaError::UnexpectedStatus(other)),
    }
    let strategy = program.extract_strategy(inst, &res.x, S::one(), program.budget);
    let result = evaluate(inst, &strategy)?.defending_result;
    Ok(ExactSolution {
        strategy,
        result,
        objective: res.objective,
        lower_bound,
        num_vars: program.lp.num_vars(),
        num_constraints: program.lp.num_constraints(),
        nodes: res.nodes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerfectDefense<S> {
    Found(DefendingStrategy<S>),
    NoPerfectStrategy,
}

impl<S> PerfectDefense<S> {
    pub fn strategy(&self) -> Option<&DefendingStrategy<S>> {
        match self {
            PerfectDefense::Found(s) => Some(s),
            PerfectDefense::NoPerfectStrategy => None,
        }
    }
}

/// Defend-indicator assignment requiring every valued node of every region to
/// be defended; zero-value nodes are fixed undefended since they cost nothing.
pub(crate) fn all_defended<S: Scalar>(
    inst: &Instance<S>,
    program: &DefenseProgram<S>,
) -> Vec<(VarId, bool)> {
    program
        .scenarios
        .iter()
        .flatten()
        .flat_map(|sc| {
            sc.defend_vars
                .iter()
                .map(|&(v, x)| (x, inst.alpha(v) > S::zero()))
        })
        .collect()
}

/// Decides with a single feasibility LP whether a strategy with defending
/// result zero exists at the instance budget, and returns one if so.
pub fn perfect_defense<S: Scalar>(inst: &Instance<S>) -> Result<PerfectDefense<S>, DcaError> {
    perfect_defense_with(inst, &PlannerConfig::default())
}

pub fn perfect_defense_with<S: Scalar>(
    inst: &Instance<S>,
    cfg: &PlannerConfig,
) -> Result<PerfectDefense<S>, DcaError> {
    let program = build_defense_milp_with(
        inst,
        inst.budget(),
        BuildOptions {
            lower_bound: None,
            dominance: cfg.dominance,
        },
    )?;
    let fixed = all_defended(inst, &program);
    let res = lpkit::check_feasibility_with(&program.lp, &fixed, &cfg.solver)?;
    match res.status {
        SolveStatus::Optimal => Ok(PerfectDefense::Found(program.extract_strategy(
            inst,
            &res.x,
            S::one(),
            inst.budget(),
        ))),
        SolveStatus::Infeasible => Ok(PerfectDefense::NoPerfectStrategy),
        other => Err(DcaError::UnexpectedStatus(other)),
    }
}
