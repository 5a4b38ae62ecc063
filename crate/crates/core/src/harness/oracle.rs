//! Brute-force reference solvers.
//!
//! These deliberately avoid the planner's formulation: every oracle builds
//! its own feasibility LP with a transfer column for every edge slot (not
//! only those reaching the attack region) and enumerates defend sets
//! explicitly. Only the LP engine is shared.

use crate::error::DcaError;
use crate::lpkit::{solve_lp, LinearProgram, Relation, SolveStatus, VarId};
use crate::netmodel::{AllocationStrategy, Instance};
use crate::Scalar;

/// Largest number of valued (node, attack) decisions the joint oracles accept.
pub const MAX_ORACLE_DECISIONS: usize = 24;
/// Exhaustive enumeration is limited to this many decisions.
pub const MAX_EXHAUSTIVE_DECISIONS: usize = 12;
/// Largest attack region the reallocation oracle enumerates.
pub const MAX_REGION: usize = 16;

/// Valued nodes of each attack region; nodes worth nothing never need
/// defending.
fn valued_regions<S: Scalar>(inst: &Instance<S>) -> Result<Vec<Vec<usize>>, DcaError> {
    (0..inst.n())
        .map(|u| {
            Ok(inst
                .attack_region(u)?
                .into_iter()
                .filter(|&v| inst.alpha(v) > S::zero())
                .collect())
        })
        .collect()
}

fn loss_of<S: Scalar>(inst: &Instance<S>, valued: &[usize], defended_mask: u32) -> S {
    valued
        .iter()
        .enumerate()
        .filter(|&(i, _)| defended_mask & (1 << i) == 0)
        .map(|(_, &v)| inst.alpha(v))
        .sum()
}

/// Resource amounts a scenario draws on: LP columns or a fixed allocation.
enum Resources<'a, S> {
    Columns(&'a [VarId]),
    Fixed(&'a [S]),
}

/// Adds transfer columns for every slot plus cap and outflow rows, and a
/// power row for each node in `defend`.
fn add_scenario<S: Scalar>(
    lp: &mut LinearProgram<S>,
    inst: &Instance<S>,
    res: &Resources<'_, S>,
    defend: &[usize],
) {
    let n = inst.n();
    let mut out_cols: Vec<Vec<VarId>> = vec![Vec::new(); n];
    let mut in_cols: Vec<Vec<VarId>> = vec![Vec::new(); n];
    for z in 0..n {
        for &(v, w) in inst.out_neighbors(z) {
            let col = match res {
                Resources::Fixed(r) => lp.add_var("", S::zero(), w * r[z]),
                Resources::Columns(r) => {
                    let col = lp.add_var("", S::zero(), S::infinity());
                    lp.add_constraint(
                        "",
                        vec![(col, S::one()), (r[z], -w)],
                        Relation::Le,
                        S::zero(),
                    );
                    col
                }
            };
            out_cols[z].push(col);
            in_cols[v].push(col);
        }
    }
    for z in 0..n {
        if out_cols[z].is_empty() {
            continue;
        }
        let mut coeffs: Vec<(VarId, S)> = out_cols[z].iter().map(|&c| (c, S::one())).collect();
        match res {
            Resources::Fixed(r) => lp.add_constraint("", coeffs, Relation::Le, r[z]),
            Resources::Columns(r) => {
                coeffs.push((r[z], -S::one()));
                lp.add_constraint("", coeffs, Relation::Le, S::zero())
            }
        };
    }
    for &v in defend {
        let mut coeffs: Vec<(VarId, S)> = out_cols[v].iter().map(|&c| (c, -S::one())).collect();
        coeffs.extend(in_cols[v].iter().map(|&c| (c, S::one())));
        match res {
            Resources::Fixed(r) => {
                lp.add_constraint("", coeffs, Relation::Ge, inst.theta(v) - r[v]);
            }
            Resources::Columns(r) => {
                coeffs.push((r[v], S::one()));
                lp.add_constraint("", coeffs, Relation::Ge, inst.theta(v));
            }
        }
    }
}

fn is_feasible<S: Scalar>(lp: &LinearProgram<S>) -> Result<bool, DcaError> {
    let res = solve_lp(lp)?;
    match res.status {
        SolveStatus::Optimal => Ok(true),
        SolveStatus::Infeasible => Ok(false),
        other => Err(DcaError::UnexpectedStatus(other)),
    }
}

/// Whether one allocation within `budget` lets every scenario defend its
/// listed nodes simultaneously.
fn jointly_feasible<S: Scalar>(
    inst: &Instance<S>,
    budget: S,
    defend_sets: &[&[usize]],
) -> Result<bool, DcaError> {
    let mut lp = LinearProgram::new();
    let r: Vec<VarId> = (0..inst.n())
        .map(|_| lp.add_var("", S::zero(), S::infinity()))
        .collect();
    lp.add_constraint(
        "",
        r.iter().map(|&c| (c, S::one())).collect(),
        Relation::Le,
        budget,
    );
    for set in defend_sets.iter().filter(|s| !s.is_empty()) {
        add_scenario(&mut lp, inst, &Resources::Columns(&r), set);
    }
    is_feasible(&lp)
}

fn decision_count(regions: &[Vec<usize>]) -> usize {
    regions.iter().map(Vec::len).sum()
}

/// Optimal defending result at the instance budget.
///
/// Searches over candidate loss levels (every achievable per-attack loss).
/// For a level `L`, each attack only needs one inclusion-minimal defend set
/// whose leftover value is at most `L`; a depth-first search over those
/// choices, pruned by feasibility of the partial choice, decides whether `L`
/// is reachable. Reachability is monotone in `L`, so the levels are
/// bisected.
pub fn oracle_exact<S: Scalar>(inst: &Instance<S>) -> Result<S, DcaError> {
    let regions = valued_regions(inst)?;
    let decisions = decision_count(&regions);
    if decisions > MAX_ORACLE_DECISIONS {
        return Err(DcaError::Refused(format!(
            "{decisions} defend decisions exceed the oracle limit of {MAX_ORACLE_DECISIONS}"
        )));
    }
    let mut levels: Vec<S> = vec![S::zero()];
    for valued in &regions {
        for mask in 0..1u32 << valued.len() {
            levels.push(loss_of(inst, valued, mask));
        }
    }
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    levels.dedup_by(|a, b| (*a - *b).abs() <= S::lit(1e-12) * (S::one() + b.abs()));

    // the top level needs no defence at all
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if level_reachable(inst, &regions, levels[mid])? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(levels[lo])
}

fn level_reachable<S: Scalar>(
    inst: &Instance<S>,
    regions: &[Vec<usize>],
    level: S,
) -> Result<bool, DcaError> {
    let slack = S::lit(1e-9) * (S::one() + level.abs());
    let mut options: Vec<Vec<Vec<usize>>> = Vec::new();
    for valued in regions.iter().filter(|r| !r.is_empty()) {
        let mut minimal = Vec::new();
        for mask in 0..1u32 << valued.len() {
            let loss = loss_of(inst, valued, mask);
            if loss > level + slack {
                continue;
            }
            // dropping any defended node must push the loss over the level
            let tight = (0..valued.len())
                .filter(|&i| mask & (1 << i) != 0)
                .all(|i| loss + inst.alpha(valued[i]) > level + slack);
            if tight {
                minimal.push(
                    (0..valued.len())
                        .filter(|&i| mask & (1 << i) != 0)
                        .map(|i| valued[i])
                        .collect(),
                );
            }
        }
        options.push(minimal);
    }
    // most constrained scenarios first
    options.sort_by_key(Vec::len);
    let mut chosen: Vec<&[usize]> = Vec::new();
    search(inst, &options, &mut chosen)
}

fn search<'a, S: Scalar>(
    inst: &Instance<S>,
    options: &'a [Vec<Vec<usize>>],
    chosen: &mut Vec<&'a [usize]>,
) -> Result<bool, DcaError> {
    let depth = chosen.len();
    if depth == options.len() {
        return Ok(true);
    }
    for set in &options[depth] {
        chosen.push(set);
        if jointly_feasible(inst, inst.budget(), chosen)? && search(inst, options, chosen)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Same optimum as [`oracle_exact`] by trying every joint defend assignment.
/// Only for tiny instances; used to cross-check the level search.
pub fn oracle_exact_exhaustive<S: Scalar>(inst: &Instance<S>) -> Result<S, DcaError> {
    let regions: Vec<Vec<usize>> = valued_regions(inst)?
        .into_iter()
        .filter(|r| !r.is_empty())
        .collect();
    let decisions = decision_count(&regions);
    if decisions > MAX_EXHAUSTIVE_DECISIONS {
        return Err(DcaError::Refused(format!(
            "{decisions} defend decisions exceed the exhaustive limit of {MAX_EXHAUSTIVE_DECISIONS}"
        )));
    }
    let mut best = regions
        .iter()
        .map(|r| loss_of(inst, r, 0))
        .fold(S::zero(), S::max);
    for joint in 0..1u64 << decisions {
        let mut shift = 0;
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(regions.len());
        let mut worst = S::zero();
        for valued in &regions {
            let mask = ((joint >> shift) & ((1 << valued.len()) - 1)) as u32;
            shift += valued.len();
            worst = worst.max(loss_of(inst, valued, mask));
            sets.push(
                (0..valued.len())
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| valued[i])
                    .collect(),
            );
        }
        if worst >= best {
            continue;
        }
        let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
        if jointly_feasible(inst, inst.budget(), &refs)? {
            best = worst;
        }
    }
    Ok(best)
}

/// Minimum loss of an attack at `u` over all reallocations of `alloc`, by
/// trying defend sets in order of increasing loss.
pub fn oracle_reallocation<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
) -> Result<S, DcaError> {
    let region = inst.attack_region(u)?;
    if region.len() > MAX_REGION {
        return Err(DcaError::Refused(format!(
            "region of {} nodes exceeds the oracle limit of {MAX_REGION}",
            region.len()
        )));
    }
    let valued: Vec<usize> = region
        .into_iter()
        .filter(|&v| inst.alpha(v) > S::zero())
        .collect();
    let mut masks: Vec<(S, u32)> = (0..1u32 << valued.len())
        .map(|m| (loss_of(inst, &valued, m), m))
        .collect();
    masks.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    for (loss, mask) in masks {
        let defend: Vec<usize> = (0..valued.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| valued[i])
            .collect();
        let mut lp = LinearProgram::new();
        add_scenario(&mut lp, inst, &Resources::Fixed(&alloc.r), &defend);
        if is_feasible(&lp)? {
            return Ok(loss);
        }
    }
    unreachable!("defending nothing is always feasible")
}

/// Best result when attacks do not spread: node `u` can be defended exactly
/// when `r_u` plus everything its in-neighbours may send reaches `theta_u`.
/// The smallest level `L` such that all nodes worth more than `L` can be
/// covered this way within budget is optimal.
pub fn oracle_single_threshold<S: Scalar>(inst: &Instance<S>) -> Result<S, DcaError> {
    if inst.k() != 0 {
        return Err(DcaError::Config(format!(
            "single-threshold oracle needs k = 0, got {}",
            inst.k()
        )));
    }
    let mut levels: Vec<S> = (0..inst.n()).map(|v| inst.alpha(v)).collect();
    levels.push(S::zero());
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    levels.dedup();
    for level in levels {
        let mut lp = LinearProgram::new();
        let r: Vec<VarId> = (0..inst.n())
            .map(|_| lp.add_var("", S::zero(), S::infinity()))
            .collect();
        lp.add_constraint(
            "",
            r.iter().map(|&c| (c, S::one())).collect(),
            Relation::Le,
            inst.budget(),
        );
        for u in (0..inst.n()).filter(|&u| inst.alpha(u) > level) {
            let mut coeffs = vec![(r[u], S::one())];
            coeffs.extend(inst.in_neighbors(u).iter().map(|&(z, w)| (r[z], w)));
            lp.add_constraint("", coeffs, Relation::Ge, inst.theta(u));
        }
        if is_feasible(&lp)? {
            return Ok(level);
        }
    }
    unreachable!("the largest value needs no defence")
}

/// Defending result of an allocation when attacks do not spread and every
/// attacked node receives the most its in-neighbours can send.
pub fn single_threshold_result<S: Scalar>(inst: &Instance<S>, alloc: &AllocationStrategy<S>) -> S {
    (0..inst.n())
        .filter(|&u| inst.max_power(u, &alloc.r) < inst.theta(u) - S::def_tol())
        .map(|u| inst.alpha(u))
        .fold(S::zero(), S::max)
}
