//! Relations between the planners on small random instances.

mod common;

use common::{decisions, small_instances};
use dca_core::harness::{gen_gnp, oracle_exact_exhaustive, GenParams, MAX_EXHAUSTIVE_DECISIONS};
use dca_core::netmodel::{self, evaluate, Edge, NodeParams};
use dca_core::planner::{
    ba_epsilon, ba_epsilon_tau, ba_grid, greedy, greedy_r, lp_lower_bound, perfect_defense,
    solve_exact, tau_grid, PerfectDefense, PlannerConfig,
};
use dca_core::Instance;

fn result(g: &Instance, s: &dca_core::DefendingStrategy) -> f64 {
    evaluate(g, s).unwrap().defending_result
}

#[test]
fn bound_chain_on_small_instances() {
    for (i, g) in small_instances(40, 7, 1, 500).iter().enumerate() {
        let lb = lp_lower_bound(g).unwrap();
        let exact = solve_exact(g).unwrap();
        assert!(
            (exact.objective - exact.result).abs() < 1e-6,
            "instance {i}"
        );
        assert!(exact.strategy.allocation.total() <= g.budget() + 1e-6);
        assert!(
            lb <= exact.result + 1e-6,
            "instance {i}: lb {lb} > exact {}",
            exact.result
        );

        let g_res = result(g, &greedy(g));
        let gr_res = result(g, &greedy_r(g));
        assert!(exact.result <= gr_res + 1e-6, "instance {i}");
        assert!(
            gr_res <= g_res + 1e-9,
            "instance {i}: greedy-r {gr_res} > greedy {g_res}"
        );

        for eps in [0.3, 0.6, 0.9] {
            let ba = ba_epsilon(g, eps).unwrap();
            let bt = ba_epsilon_tau(g, eps, &tau_grid(eps, 20)).unwrap();
            assert_eq!(ba.result, result(g, &ba.strategy));
            assert!(exact.result <= bt.result + 1e-6, "instance {i}, eps {eps}");
            assert!(bt.result <= ba.result + 1e-9, "instance {i}, eps {eps}");
        }
        let (plain, tau) = ba_grid(g, &PlannerConfig::default()).unwrap();
        assert!(tau.result <= plain.result + 1e-9);
        assert!(exact.result <= tau.result + 1e-6);
    }
}

#[test]
fn perfect_defense_iff_zero_loss() {
    for g in small_instances(30, 6, 1, 700) {
        let exact = solve_exact(&g).unwrap().result;
        match perfect_defense(&g).unwrap() {
            PerfectDefense::Found(s) => {
                assert_eq!(result(&g, &s), 0.0);
                assert!(exact < 1e-6);
            }
            PerfectDefense::NoPerfectStrategy => assert!(exact > 1e-6),
        }
    }
}

#[test]
fn exact_matches_exhaustive_oracle_with_wider_spread() {
    let mut checked = 0;
    for g in small_instances(60, 5, 2, 900) {
        if decisions(&g) > MAX_EXHAUSTIVE_DECISIONS {
            continue;
        }
        let oracle = oracle_exact_exhaustive(&g).unwrap();
        let exact = solve_exact(&g).unwrap().result;
        assert!(
            (oracle - exact).abs() < 1e-6,
            "oracle {oracle} vs exact {exact}"
        );
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} instances small enough");
}

#[test]
fn scaling_values_scales_the_result() {
    // halving integral values disables the integral-objective shortcut
    for g in small_instances(15, 6, 1, 1100) {
        let nodes: Vec<NodeParams<f64>> = g
            .nodes()
            .iter()
            .map(|p| NodeParams {
                theta: p.theta,
                alpha: p.alpha * 0.5,
            })
            .collect();
        let h = Instance::new(
            nodes,
            g.edges().to_vec(),
            g.is_directed(),
            g.k(),
            g.budget(),
        )
        .unwrap();
        let a = solve_exact(&g).unwrap().result;
        let b = solve_exact(&h).unwrap().result;
        assert!((a * 0.5 - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn single_precision_agrees() {
    for seed in 0..10u64 {
        let params = GenParams {
            budget_fraction: 0.4,
            ..GenParams::default()
        };
        let g64: Instance = gen_gnp(6, 0.4, seed, &params).unwrap();
        let nodes = g64
            .nodes()
            .iter()
            .map(|p| NodeParams {
                theta: p.theta as f32,
                alpha: p.alpha as f32,
            })
            .collect();
        let edges = g64
            .edges()
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                w: e.w as f32,
            })
            .collect();
        let g32: netmodel::Instance<f32> =
            netmodel::Instance::new(nodes, edges, false, 1, g64.budget() as f32).unwrap();
        let a = solve_exact(&g64).unwrap().result;
        let b = solve_exact(&g32).unwrap().result;
        assert!(
            (f64::from(b) - a).abs() < 1e-3,
            "seed {seed}: f64 {a}, f32 {b}"
        );
        let ba = ba_epsilon(&g32, 0.5).unwrap();
        assert!(ba.result >= b - 1e-3);
    }
}
