//! Greedy baselines: value-ordered allocation, optionally followed by greedy
//! per-attack transfers.

use std::cmp::Ordering;

use crate::netmodel::{
    loss_of_attack, AllocationStrategy, DefendingStrategy, Instance, ReallocationStrategy,
};
use crate::Scalar;

/// Node ids by decreasing value, ties by increasing id.
fn by_value<S: Scalar>(inst: &Instance<S>, nodes: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut order: Vec<usize> = nodes.into_iter().collect();
    order.sort_by(|&a, &b| {
        inst.alpha(b)
            .partial_cmp(&inst.alpha(a))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

fn greedy_allocation<S: Scalar>(inst: &Instance<S>) -> AllocationStrategy<S> {
    let mut r = vec![S::zero(); inst.n()];
    let mut left = inst.budget();
    for v in by_value(inst, 0..inst.n()) {
        if left <= S::zero() {
            break;
        }
        let give = inst.theta(v).min(left);
        r[v] = give;
        left -= give;
    }
    AllocationStrategy { r }
}

/// Fills thresholds in decreasing order of value until the budget runs out;
/// never transfers.
pub fn greedy<S: Scalar>(inst: &Instance<S>) -> DefendingStrategy<S> {
    DefendingStrategy::without_reallocation(greedy_allocation(inst))
}

/// Greedy allocation plus, for each attack, pulling resource into region
/// nodes in decreasing order of value.
pub fn greedy_r<S: Scalar>(inst: &Instance<S>) -> DefendingStrategy<S> {
    let allocation = greedy_allocation(inst);
    let reallocations = (0..inst.n())
        .map(|u| greedy_response(inst, &allocation, u))
        .collect();
    DefendingStrategy {
        allocation,
        reallocations,
    }
}

fn greedy_response<S: Scalar>(
    inst: &Instance<S>,
    alloc: &AllocationStrategy<S>,
    u: usize,
) -> ReallocationStrategy<S> {
    let n = inst.n();
    let r = &alloc.r;
    let mut power = r.clone();
    let mut sent = vec![S::zero(); n];
    let mut protected = vec![false; n];
    let mut t = ReallocationStrategy::null(u);
    let region = inst
        .attack_region(u)
        .expect("node ids come from the instance");
    let tol = S::def_tol();

    for v in by_value(inst, region) {
        let theta = inst.theta(v);
        if power[v] >= theta - tol {
            protected[v] = true;
            continue;
        }
        let mut donors: Vec<(usize, S)> = inst
            .in_neighbors(v)
            .iter()
            .map(|&(z, w)| {
                let mut avail = (w * r[z] - t.get(z, v)).min(r[z] - sent[z]);
                if protected[z] {
                    avail = avail.min(power[z] - inst.theta(z));
                }
                (z, avail.max(S::zero()))
            })
            .filter(|&(_, a)| a > S::zero())
            .collect();
        donors.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        let mut need = theta - power[v];
        for (z, avail) in donors {
            if need <= S::zero() {
                break;
            }
            let amount = avail.min(need);
            *t.transfers.entry((z, v)).or_insert_with(S::zero) += amount;
            power[z] -= amount;
            power[v] += amount;
            sent[z] += amount;
            need -= amount;
        }
        if power[v] >= theta - tol {
            protected[v] = true;
        }
    }
    // pulls that leave the target short can break donors; never do worse
    // than staying put
    let loss = |t: &ReallocationStrategy<S>| {
        loss_of_attack(inst, alloc, t, u).expect("strategy built for this attack")
    };
    let null = ReallocationStrategy::null(u);
    if loss(&t) > loss(&null) {
        null
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{evaluate, Edge, NodeParams};

    #[test]
    fn two_nodes_rule() {
        let nodes = vec![
            NodeParams {
                theta: 4.0,
                alpha: 5.0,
            },
            NodeParams {
                theta: 4.0,
                alpha: 1.0,
            },
        ];
        let g = Instance::new(nodes, vec![Edge { u: 0, v: 1, w: 0.5 }], false, 1, 4.0).unwrap();
        assert_eq!(greedy(&g).allocation.r, vec![4.0, 0.0]);
    }

    #[test]
    fn partial_last_node_and_ties_by_id() {
        let nodes = vec![
            NodeParams {
                theta: 2.0,
                alpha: 1.0
            };
            3
        ];
        let g = Instance::new(nodes, vec![], false, 0, 3.0).unwrap();
        assert_eq!(greedy(&g).allocation.r, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn large_budget_defends_everything() {
        let nodes = vec![
            NodeParams {
                theta: 2.0,
                alpha: 1.0
            };
            4
        ];
        let edges = (0..3)
            .map(|i| Edge {
                u: i,
                v: i + 1,
                w: 0.7,
            })
            .collect();
        let g = Instance::new(nodes, edges, false, 2, 8.0).unwrap();
        assert_eq!(evaluate(&g, &greedy(&g)).unwrap().defending_result, 0.0);
        assert_eq!(evaluate(&g, &greedy_r(&g)).unwrap().defending_result, 0.0);
    }

    #[test]
    fn realloc_moves_spare_resource() {
        // 0 (alpha 5, theta 2) gets everything, neighbour 1 is valued less
        let nodes = vec![
            NodeParams {
                theta: 2.0,
                alpha: 5.0,
            },
            NodeParams {
                theta: 3.0,
                alpha: 4.0,
            },
            NodeParams {
                theta: 1.0,
                alpha: 3.0,
            },
        ];
        let edges = vec![Edge { u: 0, v: 1, w: 1.0 }, Edge { u: 2, v: 1, w: 1.0 }];
        let g = Instance::new(nodes, edges, false, 1, 4.0).unwrap();
        let plain = evaluate(&g, &greedy(&g)).unwrap();
        let with_r = evaluate(&g, &greedy_r(&g)).unwrap();
        assert!(with_r.defending_result <= plain.defending_result);
        // node 0 never drops below its threshold while it is exposed
        let s = greedy_r(&g);
        for t in &s.reallocations {
            if !g.attack_region(t.attacked).unwrap().contains(&0) {
                continue;
            }
            let p0 = crate::netmodel::defending_power(&g, &s.allocation, t, 0);
            assert!(p0 >= 2.0 - 1e-9);
        }
    }
}
