//! Optimal response to a single attack under a fixed allocation.
//!
//! With the allocation fixed, every resource is a constant, so edge caps
//! become variable bounds and only the defend indicators are integral.
//! Transfer variables exist only for slots whose receiver lies in the attack
//! region.

use std::collections::BTreeMap;

use crate::error::DcaError;
use crate::lpkit::{self, LinearProgram, Relation, SolveStatus, SolverOptions, VarId};
use crate::netmodel::{self, AllocationStrategy, Instance, ReallocationStrategy};
use crate::Scalar;

/// The reallocation MILP plus the mapping from model objects to columns.
#[derive(Debug, Clone)]
pub struct ReallocationProgram<S> {
    pub lp: LinearProgram<S>,
    pub attacked: usize,
    pub region: Vec<usize>,
    /// `(node, x column)` for every node in the region.
    pub defend_vars: Vec<(usize, VarId)>,
    /// `((sender, receiver), t column)`.
    pub transfer_vars: Vec<((usize, usize), VarId)>,
}

pub fn build_reallocation_milp<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
) -> Result<ReallocationProgram<S>, DcaError> {
    inst.check_node(u)?;
    alloc.validate(inst)?;
    let region = inst.attack_region(u)?;
    let mut in_region = vec![false; inst.n()];
    for &v in &region {
        in_region[v] = true;
    }

    let mut lp = LinearProgram::new();
    let defend_vars: Vec<(usize, VarId)> = region
        .iter()
        .map(|&v| (v, lp.add_binary(format!("x_{v}"))))
        .collect();

    let mut transfer_vars = Vec::new();
    let mut slot: BTreeMap<(usize, usize), VarId> = BTreeMap::new();
    for &v in &region {
        for &(z, w) in inst.in_neighbors(v) {
            let cap = w * alloc.r[z].max(S::zero());
            let col = lp.add_var(format!("t_{z}_{v}"), S::zero(), cap);
            transfer_vars.push(((z, v), col));
            slot.insert((z, v), col);
        }
    }

    for &(v, x) in &defend_vars {
        let mut coeffs: Vec<(VarId, S)> = Vec::new();
        for (&(_, _), &col) in slot.range((v, 0)..(v + 1, 0)) {
            coeffs.push((col, -S::one()));
        }
        for &(z, _) in inst.in_neighbors(v) {
            coeffs.push((slot[&(z, v)], S::one()));
        }
        coeffs.push((x, -inst.theta(v)));
        lp.add_constraint(format!("power_{v}"), coeffs, Relation::Ge, -alloc.r[v]);
    }

    let mut senders: Vec<usize> = slot.keys().map(|&(z, _)| z).collect();
    senders.dedup();
    for z in senders {
        let coeffs: Vec<(VarId, S)> = slot
            .range((z, 0)..(z + 1, 0))
            .map(|(_, &col)| (col, S::one()))
            .collect();
        lp.add_constraint(
            format!("outflow_{z}"),
            coeffs,
            Relation::Le,
            alloc.r[z].max(S::zero()),
        );
    }

    let total: S = region.iter().map(|&v| inst.alpha(v)).sum();
    lp.set_objective(
        defend_vars
            .iter()
            .map(|&(v, x)| (x, -inst.alpha(v)))
            .collect(),
        total,
    );

    Ok(ReallocationProgram {
        lp,
        attacked: u,
        region,
        defend_vars,
        transfer_vars,
    })
}

impl<S: Scalar> ReallocationProgram<S> {
    /// Transfers read off a solution vector, clamped into their caps.
    pub fn transfers(&self, x: &[S]) -> ReallocationStrategy<S> {
        let mut realloc = ReallocationStrategy::null(self.attacked);
        for &(key, col) in &self.transfer_vars {
            let cap = self.lp.vars[col].upper;
            let t = x[col].max(S::zero()).min(cap);
            if t > S::lit(1e-12) {
                realloc.transfers.insert(key, t);
            }
        }
        realloc
    }
}

/// Loss when no transfer happens.
pub fn null_loss<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
) -> Result<S, DcaError> {
    Ok(netmodel::loss_of_attack(
        inst,
        alloc,
        &ReallocationStrategy::null(u),
        u,
    )?)
}

/// Minimises the loss of an attack at `u` over all reallocations.
pub fn optimal_reallocation<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
) -> Result<(ReallocationStrategy<S>, S), DcaError> {
    optimal_reallocation_with(inst, alloc, u, &SolverOptions::default())
}

pub fn optimal_reallocation_with<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
    opts: &SolverOptions,
) -> Result<(ReallocationStrategy<S>, S), DcaError> {
    let program = build_reallocation_milp(inst, alloc, u)?;
    if program
        .transfer_vars
        .iter()
        .all(|&(_, col)| program.lp.vars[col].upper <= S::zero())
    {
        return Ok((ReallocationStrategy::null(u), null_loss(inst, alloc, u)?));
    }
    let res = lpkit::solve_mip_with(&program.lp, opts)?;
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
    let realloc = program.transfers(&res.x);
    let loss = netmodel::loss_of_attack(inst, alloc, &realloc, u)?;
    Ok((realloc, loss))
}

/// Optimum of the relaxation (defend indicators in [0,1]); a lower bound on
/// the optimal loss.
pub fn reallocation_lp_bound<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
) -> Result<S, DcaError> {
    let program = build_reallocation_milp(inst, alloc, u)?;
    let res = lpkit::solve_lp(&program.lp.relaxed())?;
    match res.status {
        SolveStatus::Optimal => Ok(res.objective),
        other => Err(DcaError::UnexpectedStatus(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Edge, NodeParams};

    fn single(eps: f64) -> (Instance<f64>, AllocationStrategy<f64>) {
        let g = Instance::new(
            vec![NodeParams {
                theta: 1.0,
                alpha: 1.0,
            }],
            vec![],
            false,
            1,
            1.0 - eps,
        )
        .unwrap();
        (g, AllocationStrategy { r: vec![1.0 - eps] })
    }

    #[test]
    fn integrality_gap_family() {
        for eps in [0.5, 0.25, 0.1] {
            let (g, a) = single(eps);
            let (t, loss) = optimal_reallocation(&g, &a, 0).unwrap();
            assert!(t.transfers.is_empty());
            assert!((loss - 1.0).abs() < 1e-9);
            let lb = reallocation_lp_bound(&g, &a, 0).unwrap();
            assert!((lb - eps).abs() < 1e-9, "eps {eps}: {lb}");
        }
    }

    #[test]
    fn path_variable_count() {
        // 0-1-2-3-4, attack 2 with k=1: region {1,2,3}; in-slots 2+2+2
        let nodes = vec![
            NodeParams {
                theta: 2.0,
                alpha: 1.0
            };
            5
        ];
        let edges = (0..4)
            .map(|i| Edge {
                u: i,
                v: i + 1,
                w: 0.5,
            })
            .collect();
        let g = Instance::new(nodes, edges, false, 1, 10.0).unwrap();
        let a = AllocationStrategy { r: vec![2.0; 5] };
        let p = build_reallocation_milp(&g, &a, 2).unwrap();
        assert_eq!(p.defend_vars.len(), 3);
        assert_eq!(p.transfer_vars.len(), 6);
        assert_eq!(p.lp.num_binaries(), 3);

        let g0 = g.with_k(0);
        let p = build_reallocation_milp(&g0, &a, 2).unwrap();
        assert_eq!(p.defend_vars, vec![(2, 0)]);
        assert!(p.transfer_vars.iter().all(|&((_, v), _)| v == 2));
    }

    #[test]
    fn isolated_fast_path() {
        let nodes = vec![
            NodeParams {
                theta: 2.0,
                alpha: 1.0,
            },
            NodeParams {
                theta: 1.0,
                alpha: 4.0,
            },
            NodeParams {
                theta: 3.0,
                alpha: 2.0,
            },
        ];
        let edges = vec![Edge { u: 0, v: 1, w: 0.0 }, Edge { u: 1, v: 2, w: 0.0 }];
        let g = Instance::new(nodes, edges, false, 1, 10.0).unwrap();
        let a = AllocationStrategy {
            r: vec![1.0, 1.0, 3.0],
        };
        let (t, loss) = optimal_reallocation(&g, &a, 1).unwrap();
        assert!(t.transfers.is_empty());
        assert_eq!(loss, 1.0);
    }

    #[test]
    fn rejects_bad_node_and_allocation() {
        let (g, a) = single(0.5);
        assert!(build_reallocation_milp(&g, &a, 3).is_err());
        let too_much = AllocationStrategy { r: vec![2.0] };
        assert!(build_reallocation_milp(&g, &too_much, 0).is_err());
    }
}
