//! Bi-criteria rounding of the relaxation solved at a reduced budget.
//!
//! Both algorithms solve the relaxation at budget `eps * R`. The plain
//! variant keeps every defend indicator that reached `eps` and scales all
//! resources and transfers up by `1/eps`, which lands inside budget `R`. The
//! tau variant rounds more aggressively at a threshold `tau <= eps` and asks a
//! feasibility LP at full budget to realise the rounded pattern.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::exact::all_defended;
use super::program::{build_defense_milp, DefenseProgram};
use super::PlannerConfig;
use crate::error::DcaError;
use crate::lpkit::{self, SolveStatus, VarId};
use crate::netmodel::{evaluate, DefendingStrategy, Instance};
use crate::Scalar;

#[derive(Debug, Clone)]
pub struct BaSolution<S> {
    pub strategy: DefendingStrategy<S>,
    /// Defending result of `strategy` as evaluated by the model.
    pub result: S,
    pub epsilon: S,
    /// Rounding threshold that produced `strategy`; equals `epsilon` for the
    /// plain scaling rounding.
    pub tau: S,
    /// Optimum of the relaxation at budget `epsilon * R`.
    pub lp_objective: S,
    /// Worst-case loss implied by the rounded indicators.
    pub rounded_objective: S,
}

/// Evenly spaced thresholds `eps * i / points`, `i = 1..=points`.
pub fn tau_grid<S: Scalar>(epsilon: S, points: usize) -> Vec<S> {
    let count = S::from_usize(points.max(1)).expect("small integer");
    (1..=points.max(1))
        .map(|i| epsilon * S::from_usize(i).expect("small integer") / count)
        .collect()
}

fn check_epsilon<S: Scalar>(epsilon: S) -> Result<(), DcaError> {
    if epsilon > S::zero() && epsilon < S::one() {
        Ok(())
    } else {
        Err(DcaError::Config(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )))
    }
}

struct Relaxation<S> {
    program: DefenseProgram<S>,
    x: Vec<S>,
    objective: S,
}

fn solve_reduced<S: Scalar>(
    inst: &Instance<S>,
    epsilon: S,
    cfg: &PlannerConfig,
) -> Result<Relaxation<S>, DcaError> {
    check_epsilon(epsilon)?;
    let program = build_defense_milp(inst, inst.budget())?;
    let reduced = program.with_budget(epsilon * inst.budget());
    let res = lpkit::solve_lp_with(&reduced.lp.relaxed(), &cfg.solver)?;
    if res.status != SolveStatus::Optimal {
        return Err(DcaError::UnexpectedStatus(res.status));
    }
    Ok(Relaxation {
        program,
        x: res.x,
        objective: res.objective,
    })
}

/// Indicator assignment keeping every valued region node whose relaxed
/// indicator reached `threshold`.
fn round_at<S: Scalar>(
    inst: &Instance<S>,
    program: &DefenseProgram<S>,
    x: &[S],
    threshold: S,
) -> Vec<(VarId, bool)> {
    let slack = S::lit(1e-9);
    all_defended(inst, program)
        .into_iter()
        .map(|(col, valued)| (col, valued && x[col] >= threshold - slack))
        .collect()
}

fn rounded_loss<S: Scalar>(
    inst: &Instance<S>,
    program: &DefenseProgram<S>,
    fixed: &[(VarId, bool)],
) -> S {
    let kept: BTreeSet<VarId> = fixed.iter().filter(|f| f.1).map(|f| f.0).collect();
    program
        .scenarios
        .iter()
        .flatten()
        .map(|sc| {
            sc.defend_vars
                .iter()
                .filter(|(_, col)| !kept.contains(col))
                .map(|&(v, _)| inst.alpha(v))
                .sum::<S>()
        })
        .fold(S::zero(), S::max)
}

fn scaled_rounding<S: Scalar>(
    inst: &Instance<S>,
    relax: &Relaxation<S>,
    epsilon: S,
) -> Result<BaSolution<S>, DcaError> {
    let fixed = round_at(inst, &relax.program, &relax.x, epsilon);
    let strategy =
        relax
            .program
            .extract_strategy(inst, &relax.x, S::one() / epsilon, inst.budget());
    let result = evaluate(inst, &strategy)?.defending_result;
    Ok(BaSolution {
        strategy,
        result,
        epsilon,
        tau: epsilon,
        lp_objective: relax.objective,
        rounded_objective: rounded_loss(inst, &relax.program, &fixed),
    })
}

/// `(1/(1-eps), 1/eps)`-approximate strategy by threshold rounding at `eps`
/// and scaling by `1/eps`.
pub fn ba_epsilon<S: Scalar>(inst: &Instance<S>, epsilon: S) -> Result<BaSolution<S>, DcaError> {
    ba_epsilon_with(inst, epsilon, &PlannerConfig::default())
}

pub fn ba_epsilon_with<S: Scalar>(
    inst: &Instance<S>,
    epsilon: S,
    cfg: &PlannerConfig,
) -> Result<BaSolution<S>, DcaError> {
    let relax = solve_reduced(inst, epsilon, cfg)?;
    scaled_rounding(inst, &relax, epsilon)
}

/// Tries every threshold in `taus` (plus the plain rounding) and keeps the
/// strategy with the smallest evaluated defending result. Ties go to the
/// smallest threshold.
pub fn ba_epsilon_tau<S: Scalar>(
    inst: &Instance<S>,
    epsilon: S,
    taus: &[S],
) -> Result<BaSolution<S>, DcaError> {
    ba_epsilon_tau_with(inst, epsilon, taus, &PlannerConfig::default())
}

pub fn ba_epsilon_tau_with<S: Scalar>(
    inst: &Instance<S>,
    epsilon: S,
    taus: &[S],
    cfg: &PlannerConfig,
) -> Result<BaSolution<S>, DcaError> {
    let relax = solve_reduced(inst, epsilon, cfg)?;
    let mut taus: Vec<S> = taus.to_vec();
    if let Some(bad) = taus.iter().find(|&&t| !(t > S::zero() && t <= epsilon)) {
        return Err(DcaError::Config(format!(
            "tau must lie in (0, epsilon], got {bad}"
        )));
    }
    taus.sort_by(|a, b| a.partial_cmp(b).expect("finite thresholds"));

    // distinct rounding patterns only; the first tau producing a pattern wins
    let mut seen = BTreeSet::new();
    let mut patterns = Vec::new();
    for &tau in &taus {
        let fixed = round_at(inst, &relax.program, &relax.x, tau);
        let key: Vec<bool> = fixed.iter().map(|f| f.1).collect();
        if seen.insert(key) {
            patterns.push((tau, fixed));
        }
    }

    let candidates: Vec<Option<BaSolution<S>>> = patterns
        .par_iter()
        .map(|(tau, fixed)| -> Result<Option<BaSolution<S>>, DcaError> {
            let res = lpkit::check_feasibility_with(&relax.program.lp, fixed, &cfg.solver)?;
            if res.status != SolveStatus::Optimal {
                return Ok(None);
            }
            let strategy = relax
                .program
                .extract_strategy(inst, &res.x, S::one(), inst.budget());
            let result = evaluate(inst, &strategy)?.defending_result;
            Ok(Some(BaSolution {
                strategy,
                result,
                epsilon,
                tau: *tau,
                lp_objective: relax.objective,
                rounded_objective: rounded_loss(inst, &relax.program, fixed),
            }))
        })
        .collect::<Result<_, _>>()?;

    let mut best = scaled_rounding(inst, &relax, epsilon)?;
    for cand in candidates.into_iter().flatten() {
        if cand.result < best.result || (cand.result == best.result && cand.tau < best.tau) {
            best = cand;
        }
    }
    Ok(best)
}

/// Best plain and best tau-rounded strategies over the configured epsilon
/// grid.
pub fn ba_grid<S: Scalar>(
    inst: &Instance<S>,
    cfg: &PlannerConfig,
) -> Result<(BaSolution<S>, BaSolution<S>), DcaError> {
    cfg.validate()?;
    let per_eps: Vec<(BaSolution<S>, BaSolution<S>)> = cfg
        .epsilons
        .par_iter()
        .map(|&e| {
            let eps = S::lit(e);
            let plain = ba_epsilon_with(inst, eps, cfg)?;
            let taus = tau_grid(eps, cfg.tau_points);
            let tau = ba_epsilon_tau_with(inst, eps, &taus, cfg)?;
            Ok((plain, tau))
        })
        .collect::<Result<_, DcaError>>()?;
    let pick = |a: BaSolution<S>, b: BaSolution<S>| if b.result < a.result { b } else { a };
    let mut iter = per_eps.into_iter();
    let (mut plain, mut tau) = iter
        .next()
        .ok_or_else(|| DcaError::Config("empty epsilon grid".into()))?;
    for (p, t) in iter {
        plain = pick(plain, p);
        tau = pick(tau, t);
    }
    Ok((plain, tau))
}
