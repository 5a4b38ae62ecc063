//! The joint allocation/reallocation MILP over all attack scenarios.

use std::collections::BTreeMap;

use crate::error::DcaError;
use crate::lpkit::{LinearProgram, Relation, VarId};
use crate::netmodel::{AllocationStrategy, DefendingStrategy, Instance, ReallocationStrategy};
use crate::Scalar;

/// Columns belonging to one attack scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub attacked: usize,
    /// `(node, x column)` for each node of the attack region.
    pub defend_vars: Vec<(usize, VarId)>,
    /// `((sender, receiver), t column)`.
    pub transfer_vars: Vec<((usize, usize), VarId)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions<S> {
    /// Known lower bound on the optimal defending result; scenarios whose
    /// whole region is worth at most this much are left out.
    pub lower_bound: Option<S>,
    /// Drop edge-cap or outflow rows implied by the other family.
    pub dominance: bool,
}

impl<S> Default for BuildOptions<S> {
    fn default() -> Self {
        Self {
            lower_bound: None,
            dominance: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DefenseProgram<S> {
    pub lp: LinearProgram<S>,
    pub budget: S,
    pub budget_row: usize,
    pub resource_vars: Vec<VarId>,
    pub loss_var: VarId,
    /// One entry per node; `None` when the scenario was pruned.
    pub scenarios: Vec<Option<Scenario>>,
    pub options: BuildOptions<S>,
}

/// Builds the program with every scenario and every row.
pub fn build_defense_milp<S: Scalar>(
    inst: &Instance<S>,
    budget: S,
) -> Result<DefenseProgram<S>, DcaError> {
    build_defense_milp_with(inst, budget, BuildOptions::default())
}

pub fn build_defense_milp_with<S: Scalar>(
    inst: &Instance<S>,
    budget: S,
    options: BuildOptions<S>,
) -> Result<DefenseProgram<S>, DcaError> {
    if !(budget >= S::zero()) || !budget.is_finite() {
        return Err(DcaError::Config(format!(
            "budget must be nonnegative, got {budget}"
        )));
    }
    let n = inst.n();
    let mut lp = LinearProgram::new();
    let resource_vars: Vec<VarId> = (0..n)
        .map(|v| lp.add_var(format!("r_{v}"), S::zero(), S::infinity()))
        .collect();
    let loss_floor = options.lower_bound.unwrap_or_else(S::zero).max(S::zero());
    let loss_var = lp.add_var("loss", loss_floor, S::infinity());
    let budget_row = lp.add_constraint(
        "budget",
        resource_vars.iter().map(|&c| (c, S::one())).collect(),
        Relation::Le,
        budget,
    );

    // per-sender dominance facts
    let mut all_unit = vec![true; n];
    let mut weight_sum = vec![S::zero(); n];
    for z in 0..n {
        for &(_, w) in inst.out_neighbors(z) {
            weight_sum[z] += w;
            if w != S::one() {
                all_unit[z] = false;
            }
        }
    }
    let drop_caps = |z: usize| options.dominance && all_unit[z];
    let drop_outflow = |z: usize| options.dominance && !all_unit[z] && weight_sum[z] <= S::one();

    let mut scenarios = Vec::with_capacity(n);
    for u in 0..n {
        let region = inst.attack_region(u)?;
        if let Some(l) = options.lower_bound {
            let value: S = region.iter().map(|&v| inst.alpha(v)).sum();
            if value <= l {
                scenarios.push(None);
                continue;
            }
        }
        let mut in_region = vec![false; n];
        for &v in &region {
            in_region[v] = true;
        }

        let defend_vars: Vec<(usize, VarId)> = region
            .iter()
            .map(|&v| (v, lp.add_binary(format!("x_{u}_{v}"))))
            .collect();
        let mut slot: BTreeMap<(usize, usize), VarId> = BTreeMap::new();
        let mut transfer_vars = Vec::new();
        for &v in &region {
            for &(z, w) in inst.in_neighbors(v) {
                let upper = if w > S::zero() {
                    S::infinity()
                } else {
                    S::zero()
                };
                let col = lp.add_var(format!("t_{u}_{z}_{v}"), S::zero(), upper);
                slot.insert((z, v), col);
                transfer_vars.push(((z, v), col));
            }
        }

        for &(v, x) in &defend_vars {
            let mut coeffs = vec![(resource_vars[v], S::one())];
            for (_, &col) in slot.range((v, 0)..(v + 1, 0)) {
                coeffs.push((col, -S::one()));
            }
            for &(z, _) in inst.in_neighbors(v) {
                coeffs.push((slot[&(z, v)], S::one()));
            }
            coeffs.push((x, -inst.theta(v)));
            lp.add_constraint(format!("power_{u}_{v}"), coeffs, Relation::Ge, S::zero());
        }

        for (&(z, v), &col) in &slot {
            let w = inst.slot_weight(z, v).unwrap_or_else(S::zero);
            if w > S::zero() && !drop_caps(z) {
                lp.add_constraint(
                    format!("cap_{u}_{z}_{v}"),
                    vec![(col, S::one()), (resource_vars[z], -w)],
                    Relation::Le,
                    S::zero(),
                );
            }
        }

        let mut senders: Vec<usize> = slot.keys().map(|&(z, _)| z).collect();
        senders.dedup();
        for z in senders {
            if drop_outflow(z) {
                continue;
            }
            let mut coeffs: Vec<(VarId, S)> = slot
                .range((z, 0)..(z + 1, 0))
                .map(|(_, &col)| (col, S::one()))
                .collect();
            coeffs.push((resource_vars[z], -S::one()));
            lp.add_constraint(format!("outflow_{u}_{z}"), coeffs, Relation::Le, S::zero());
        }

        let total: S = region.iter().map(|&v| inst.alpha(v)).sum();
        let mut coeffs: Vec<(VarId, S)> = defend_vars
            .iter()
            .filter(|&&(v, _)| inst.alpha(v) != S::zero())
            .map(|&(v, x)| (x, -inst.alpha(v)))
            .collect();
        coeffs.push((loss_var, -S::one()));
        lp.add_constraint(format!("loss_{u}"), coeffs, Relation::Le, -total);

        scenarios.push(Some(Scenario {
            attacked: u,
            defend_vars,
            transfer_vars,
        }));
    }
    lp.set_objective(vec![(loss_var, S::one())], S::zero());

    Ok(DefenseProgram {
        lp,
        budget,
        budget_row,
        resource_vars,
        loss_var,
        scenarios,
        options,
    })
}

impl<S: Scalar> DefenseProgram<S> {
    /// Same structure with a different total budget.
    pub fn with_budget(&self, budget: S) -> Self {
        let mut copy = self.clone();
        copy.lp.constraints[self.budget_row].rhs = budget;
        copy.budget = budget;
        copy
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.scenarios
            .iter()
            .flatten()
            .flat_map(|s| s.defend_vars.iter().map(|&(_, x)| x))
    }

    /// Reads a strategy from a solution vector, scaling every resource and
    /// transfer by `scale`. Values are clamped into their caps so the result
    /// passes validation despite solver round-off.
    pub fn extract_strategy(
        &self,
        inst: &Instance<S>,
        x: &[S],
        scale: S,
        budget: S,
    ) -> DefendingStrategy<S> {
        let mut r: Vec<S> = self
            .resource_vars
            .iter()
            .map(|&c| (x[c] * scale).max(S::zero()))
            .collect();
        let total: S = r.iter().copied().sum();
        if total > budget && total > S::zero() {
            let shrink = budget / total;
            for v in &mut r {
                *v *= shrink;
            }
        }
        let mut reallocations = Vec::with_capacity(inst.n());
        for (u, scenario) in self.scenarios.iter().enumerate() {
            let mut t = ReallocationStrategy::null(u);
            if let Some(sc) = scenario {
                for &((z, v), col) in &sc.transfer_vars {
                    let w = inst.slot_weight(z, v).unwrap_or_else(S::zero);
                    let amount = (x[col] * scale).max(S::zero()).min(w * r[z]);
                    if amount > S::lit(1e-12) {
                        t.transfers.insert((z, v), amount);
                    }
                }
                let mut senders: Vec<usize> = t.transfers.keys().map(|&(z, _)| z).collect();
                senders.dedup();
                for z in senders {
                    let out = t.outflow(z);
                    if out > r[z] && out > S::zero() {
                        let shrink = r[z] / out;
                        for (_, amount) in t.transfers.range_mut((z, 0)..(z + 1, 0)) {
                            *amount *= shrink;
                        }
                    }
                }
            }
            reallocations.push(t);
        }
        DefendingStrategy {
            allocation: AllocationStrategy { r },
            reallocations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Edge, NodeParams};

    #[test]
    fn single_node_structure() {
        let g = Instance::new(
            vec![NodeParams {
                theta: 1.0,
                alpha: 1.0,
            }],
            vec![],
            false,
            1,
            1.0,
        )
        .unwrap();
        let p = build_defense_milp(&g, 1.0).unwrap();
        assert_eq!(p.lp.num_binaries(), 1);
        assert_eq!(p.lp.num_vars(), 3);
        // budget, power, loss
        assert_eq!(p.lp.num_constraints(), 3);
        let loss_row = p.lp.constraints.last().unwrap();
        assert_eq!(loss_row.rhs, -1.0);
    }

    #[test]
    fn isolated_model_has_zero_transfer_bounds() {
        let nodes = vec![
            NodeParams {
                theta: 1.0,
                alpha: 1.0
            };
            3
        ];
        let edges = vec![Edge { u: 0, v: 1, w: 0.0 }, Edge { u: 1, v: 2, w: 0.0 }];
        let g = Instance::new(nodes, edges, false, 1, 2.0).unwrap();
        let p = build_defense_milp(&g, 2.0).unwrap();
        let mut count = 0;
        for sc in p.scenarios.iter().flatten() {
            for &(_, col) in &sc.transfer_vars {
                assert_eq!(p.lp.vars[col].upper, 0.0);
                count += 1;
            }
        }
        assert!(count > 0);
        assert!(p.lp.constraints.iter().all(|c| !c.name.starts_with("cap")));
    }

    #[test]
    fn unit_weights_drop_caps_under_dominance() {
        let nodes = vec![
            NodeParams {
                theta: 1.0,
                alpha: 1.0
            };
            3
        ];
        let edges = vec![Edge { u: 0, v: 1, w: 1.0 }, Edge { u: 1, v: 2, w: 1.0 }];
        let g = Instance::new(nodes, edges, false, 1, 2.0).unwrap();
        let plain = build_defense_milp(&g, 2.0).unwrap();
        assert!(plain
            .lp
            .constraints
            .iter()
            .any(|c| c.name.starts_with("cap")));
        let pruned = build_defense_milp_with(
            &g,
            2.0,
            BuildOptions {
                lower_bound: None,
                dominance: true,
            },
        )
        .unwrap();
        assert!(pruned
            .lp
            .constraints
            .iter()
            .all(|c| !c.name.starts_with("cap")));
        assert!(pruned
            .lp
            .constraints
            .iter()
            .any(|c| c.name.starts_with("outflow")));
    }

    #[test]
    fn light_weights_drop_outflow_under_dominance() {
        let nodes = vec![
            NodeParams {
                theta: 1.0,
                alpha: 1.0
            };
            3
        ];
        let edges = vec![Edge { u: 0, v: 1, w: 0.4 }, Edge { u: 1, v: 2, w: 0.5 }];
        let g = Instance::new(nodes, edges, false, 1, 2.0).unwrap();
        let pruned = build_defense_milp_with(
            &g,
            2.0,
            BuildOptions {
                lower_bound: None,
                dominance: true,
            },
        )
        .unwrap();
        assert!(pruned
            .lp
            .constraints
            .iter()
            .all(|c| !c.name.starts_with("outflow")));
        assert!(pruned
            .lp
            .constraints
            .iter()
            .any(|c| c.name.starts_with("cap")));
    }

    #[test]
    fn budget_swap_keeps_structure() {
        let nodes = vec![
            NodeParams {
                theta: 1.0,
                alpha: 1.0
            };
            2
        ];
        let g = Instance::new(nodes, vec![Edge { u: 0, v: 1, w: 0.5 }], false, 1, 2.0).unwrap();
        let p = build_defense_milp(&g, 2.0).unwrap();
        let q = p.with_budget(1.0);
        assert_eq!(q.lp.num_vars(), p.lp.num_vars());
        assert_eq!(q.lp.constraints[q.budget_row].rhs, 1.0);
    }
}
