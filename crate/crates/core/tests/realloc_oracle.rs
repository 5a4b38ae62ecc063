//! Optimal reallocation against the subset-enumeration oracle.

use dca_core::harness::{gen_gnp, oracle_reallocation, GenParams};
use dca_core::netmodel::{loss_of_attack, NodeParams};
use dca_core::realloc::{null_loss, optimal_reallocation, reallocation_lp_bound};
use dca_core::{AllocationStrategy, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_allocation(g: &Instance, seed: u64) -> AllocationStrategy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AllocationStrategy {
        r: (0..g.n())
            .map(|v| rng.gen_range(0.0..1.5) * g.theta(v))
            .collect(),
    }
}

#[test]
fn matches_oracle_on_regions_up_to_twelve() {
    let mut checked = 0;
    let mut improved = 0;
    for seed in 0..40u64 {
        let n = 8 + (seed as usize % 8);
        let params = GenParams {
            k: 1 + (seed as usize % 2),
            ..GenParams::default()
        };
        let g: Instance = gen_gnp(n, 0.25, seed, &params).unwrap();
        let alloc = random_allocation(&g, seed);
        let g = g.with_budget(alloc.total()).unwrap();
        for u in 0..g.n() {
            if g.attack_region(u).unwrap().len() > 12 {
                continue;
            }
            let (plan, loss) = optimal_reallocation(&g, &alloc, u).unwrap();
            let oracle = oracle_reallocation(&g, &alloc, u).unwrap();
            assert!(
                (loss - oracle).abs() < 1e-6,
                "seed {seed} attack {u}: solver {loss}, oracle {oracle}"
            );
            plan.validate(&g, &alloc).unwrap();
            assert_eq!(loss, loss_of_attack(&g, &alloc, &plan, u).unwrap());
            let null = null_loss(&g, &alloc, u).unwrap();
            assert!(loss <= null);
            assert!(reallocation_lp_bound(&g, &alloc, u).unwrap() <= loss + 1e-9);
            improved += usize::from(loss < null);
            checked += 1;
        }
    }
    assert!(checked > 200, "only {checked} attacks checked");
    assert!(improved > 0, "transfers never mattered");
}

#[test]
fn integrality_gap_grows_without_bound() {
    let mut last_ratio = 0.0;
    for eps in [0.5, 0.1, 0.01, 0.001] {
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
        let alloc = AllocationStrategy { r: vec![1.0 - eps] };
        let (_, mip) = optimal_reallocation(&g, &alloc, 0).unwrap();
        let lp = reallocation_lp_bound(&g, &alloc, 0).unwrap();
        assert_eq!(mip, 1.0);
        assert!((lp - eps).abs() < 1e-9);
        let ratio = mip / lp;
        assert!((ratio - 1.0 / eps).abs() < 1e-6 / eps);
        assert!(ratio > last_ratio);
        last_ratio = ratio;
    }
}

#[test]
fn attacks_are_independent() {
    use rayon::prelude::*;
    let g: Instance = gen_gnp(14, 0.2, 5, &GenParams::default()).unwrap();
    let alloc = random_allocation(&g, 5);
    let g = g.with_budget(alloc.total()).unwrap();
    let serial: Vec<f64> = (0..g.n())
        .map(|u| optimal_reallocation(&g, &alloc, u).unwrap().1)
        .collect();
    let parallel: Vec<f64> = (0..g.n())
        .into_par_iter()
        .map(|u| optimal_reallocation(&g, &alloc, u).unwrap().1)
        .collect();
    assert_eq!(serial, parallel);
}
