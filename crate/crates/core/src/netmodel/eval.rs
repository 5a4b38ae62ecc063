use super::{
    AllocationStrategy, DefendingStrategy, DefenseOutcome, Instance, ModelError,
    ReallocationStrategy,
};
use crate::Scalar;

/// `p_v = r_v - outbound + inbound` under the given reallocation.
pub fn defending_power<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    realloc: &ReallocationStrategy<S>,
    v: usize,
) -> S {
    let outbound: S = inst
        .out_neighbors(v)
        .iter()
        .map(|&(z, _)| realloc.get(v, z))
        .sum();
    let inbound: S = inst
        .in_neighbors(v)
        .iter()
        .map(|&(z, _)| realloc.get(z, v))
        .sum();
    alloc.r[v] - outbound + inbound
}

pub fn is_defended<S: Scalar>(inst: &Instance<S>, v: usize, power: S) -> bool {
    power >= inst.theta(v) - S::def_tol()
}

/// Total value of the nodes in `N_k(u)` left below threshold.
pub fn loss_of_attack<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    realloc: &ReallocationStrategy<S>,
    u: usize,
) -> Result<S, ModelError> {
    inst.check_node(u)?;
    if realloc.attacked != u {
        return Err(ModelError::AttackMismatch {
            expected: u,
            found: realloc.attacked,
        });
    }
    if alloc.r.len() != inst.n() {
        return Err(ModelError::Infeasible(vec![format!(
            "allocation has {} entries for {} nodes",
            alloc.r.len(),
            inst.n()
        )]));
    }
    Ok(inst
        .attack_region(u)?
        .into_iter()
        .filter(|&v| !is_defended(inst, v, defending_power(inst, alloc, realloc, v)))
        // folded from +0: an empty float sum is -0
        .map(|v| inst.alpha(v))
        .fold(S::zero(), |acc, a| acc + a))
}

/// Validates the strategy and computes the loss of every attack.
pub fn evaluate<S: Scalar>(
    inst: &Instance<S>,
    strategy: &DefendingStrategy<S>,
) -> Result<DefenseOutcome<S>, ModelError> {
    strategy.validate(inst)?;
    let loss = strategy
        .reallocations
        .iter()
        .enumerate()
        .map(|(u, t)| loss_of_attack(inst, &strategy.allocation, t, u))
        .collect::<Result<Vec<S>, _>>()?;
    let defending_result = loss.iter().copied().fold(S::zero(), S::max);
    Ok(DefenseOutcome {
        loss,
        defending_result,
    })
}
