#![allow(dead_code)]

use dca_core::harness::{gen_gnp, GenParams};
use dca_core::netmodel::{Edge, NodeParams};
use dca_core::Instance;

/// Total number of valued (attack, node) decisions.
pub fn decisions(g: &Instance) -> usize {
    (0..g.n())
        .map(|u| {
            g.attack_region(u)
                .unwrap()
                .into_iter()
                .filter(|&v| g.alpha(v) > 0.0)
                .count()
        })
        .sum()
}

/// Seeded G(n, p) instances with `3 <= n <= max_n`, kept only when the joint
/// oracle can handle them.
pub fn small_instances(count: usize, max_n: usize, k: usize, first_seed: u64) -> Vec<Instance> {
    let mut out = Vec::with_capacity(count);
    let mut seed = first_seed;
    while out.len() < count {
        let n = 3 + (seed as usize % (max_n - 2));
        let params = GenParams {
            k,
            budget_fraction: [0.25, 0.4, 0.55][seed as usize % 3],
            ..GenParams::default()
        };
        let g = gen_gnp(n, 0.45, seed, &params).unwrap();
        seed += 1;
        if decisions(&g) <= 24 {
            out.push(g);
        }
    }
    out
}

/// Six nodes a..f with every edge weight 1/2 and every node holding 2 units.
/// The attack at `a` reaches a, b, d, e; without transfers only b and d meet
/// their thresholds, but b, d and c (via b and e) can shore up the rest.
pub fn six_node_example() -> Instance {
    let theta = [4.0, 2.0, 1.0, 2.0, 3.0, 1.0];
    let alpha = [3.0, 1.0, 1.0, 1.0, 2.0, 1.0];
    let nodes = theta
        .iter()
        .zip(alpha)
        .map(|(&theta, alpha)| NodeParams { theta, alpha })
        .collect();
    let pairs = [(0, 1), (0, 3), (0, 4), (1, 2), (2, 4), (3, 5)];
    let edges = pairs.iter().map(|&(u, v)| Edge { u, v, w: 0.5 }).collect();
    Instance::new(nodes, edges, false, 1, 12.0).unwrap()
}

/// Star on `n` nodes with centre 0; thresholds, values and weights all 1.
pub fn unit_star(n: usize, budget: f64) -> Instance {
    let nodes = vec![
        NodeParams {
            theta: 1.0,
            alpha: 1.0
        };
        n
    ];
    let edges = (1..n).map(|v| Edge { u: 0, v, w: 1.0 }).collect();
    Instance::new(nodes, edges, false, 1, budget).unwrap()
}

/// One node with threshold and value 1.
pub fn single_node(budget: f64) -> Instance {
    let nodes = vec![NodeParams {
        theta: 1.0,
        alpha: 1.0,
    }];
    Instance::new(nodes, vec![], false, 1, budget).unwrap()
}

/// All simple graphs on `n` vertices up to isomorphism, as edge lists.
pub fn graphs_up_to_iso(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut relabelled: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
                    .collect();
                relabelled.sort_unstable();
                relabelled
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canon) {
            out.push(edges);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Size of a minimum vertex cover by trying every subset.
pub fn min_vertex_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|&s| {
            edges
                .iter()
                .all(|&(a, b)| s & (1 << a) != 0 || s & (1 << b) != 0)
        })
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}
