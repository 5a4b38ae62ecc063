//! Best-bound branch-and-bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::{solve_bounded, solve_warm, Basis};
use super::{LinearProgram, LpError, SolveResult, SolveStatus, SolverOptions, VarId};
use crate::Scalar;

pub fn solve_mip<S: Scalar>(lp: &LinearProgram<S>) -> Result<SolveResult<S>, LpError> {
    solve_mip_with(lp, &SolverOptions::default())
}

struct Node<S> {
    bound: S,
    depth: usize,
    seq: usize,
    lower: Vec<S>,
    upper: Vec<S>,
    x: Vec<S>,
    basis: Option<Basis>,
}

impl<S: Scalar> PartialEq for Node<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Node<S> {}

impl<S: Scalar> PartialOrd for Node<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Node<S> {
    // max-heap: smallest bound first, then deepest, then most recent
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(self.depth.cmp(&other.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

fn most_fractional<S: Scalar>(binaries: &[VarId], x: &[S]) -> Option<VarId> {
    let mut best: Option<(VarId, S)> = None;
    for &j in binaries {
        let frac = x[j].min(S::one() - x[j]);
        if frac > S::int_tol() && best.is_none_or(|(_, f)| frac > f) {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}

/// Running averages of the objective change per unit of rounding, per
/// variable and direction.
struct Pseudocosts<S> {
    sum: Vec<[S; 2]>,
    count: Vec<[u32; 2]>,
}

impl<S: Scalar> Pseudocosts<S> {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![[S::zero(); 2]; n],
            count: vec![[0; 2]; n],
        }
    }

    fn record(&mut self, j: VarId, up: bool, distance: S, gain: S) {
        if distance > S::int_tol() {
            let d = usize::from(up);
            self.sum[j][d] += gain.max(S::zero()) / distance;
            self.count[j][d] += 1;
        }
    }

    fn mean(&self, binaries: &[VarId], d: usize) -> S {
        let (mut total, mut n) = (S::zero(), 0u32);
        for &j in binaries {
            if self.count[j][d] > 0 {
                total += self.sum[j][d] / S::lit(f64::from(self.count[j][d]));
                n += 1;
            }
        }
        if n == 0 {
            S::one()
        } else {
            total / S::lit(f64::from(n))
        }
    }

    /// Product score; unseen directions borrow the average over seen ones,
    /// ties go to the more fractional variable.
    fn select(&self, binaries: &[VarId], x: &[S]) -> Option<VarId> {
        let eps = S::lit(1e-6);
        let fallback = [self.mean(binaries, 0), self.mean(binaries, 1)];
        let mut best: Option<(VarId, S, S)> = None;
        for &j in binaries {
            let f = x[j];
            let frac = f.min(S::one() - f);
            if frac <= S::int_tol() {
                continue;
            }
            let rate = |d: usize| {
                if self.count[j][d] > 0 {
                    self.sum[j][d] / S::lit(f64::from(self.count[j][d]))
                } else {
                    fallback[d]
                }
            };
            let score = (f * rate(0)).max(eps) * ((S::one() - f) * rate(1)).max(eps);
            let better = best.is_none_or(|(_, s, fr)| {
                score > s * (S::one() + eps) || (score >= s * (S::one() - eps) && frac > fr)
            });
            if better {
                best = Some((j, score, frac));
            }
        }
        best.map(|(j, _, _)| j)
    }
}

pub fn solve_mip_with<S: Scalar>(
    lp: &LinearProgram<S>,
    opts: &SolverOptions,
) -> Result<SolveResult<S>, LpError> {
    lp.validate()?;
    let binaries: Vec<VarId> = lp.binaries().collect();
    let lower: Vec<S> = lp.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<S> = lp.vars.iter().map(|v| v.upper).collect();

    let (root, root_basis) = solve_warm(lp, &lower, &upper, None, opts);
    let mut pivots = root.pivots;
    if root.status != SolveStatus::Optimal {
        return Ok(SolveResult { nodes: 1, ..root });
    }

    let mut incumbent: Option<(S, Vec<S>)> = None;
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut nodes = 1usize;
    let mut numeric_trouble = false;

    let step = opts.objective_step.map(S::lit);
    let cutoff = opts.cutoff.map(S::lit);
    // true when nothing under `bound` can beat both the incumbent and the cutoff
    let dominated = |bound: S, incumbent: &Option<(S, Vec<S>)>| {
        let limit = match (incumbent.as_ref().map(|(v, _)| *v), cutoff) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return false,
        };
        match step {
            Some(step) => bound > limit - step + S::feas_tol() * limit.abs().max(S::one()),
            None => bound >= limit - S::lit(1e-9) * limit.abs().max(S::one()),
        }
    };
    let mut costs = Pseudocosts::new(lp.vars.len());

    let offer = |x: &[S],
                 lower: &[S],
                 upper: &[S],
                 warm: Option<&Basis>,
                 incumbent: &mut Option<(S, Vec<S>)>,
                 pivots: &mut usize| {
        // snap binaries and re-optimise the continuous part for a clean point
        let mut lo = lower.to_vec();
        let mut up = upper.to_vec();
        for &j in &binaries {
            let v = x[j].round();
            lo[j] = v;
            up[j] = v;
        }
        let (clean, _) = solve_warm(lp, &lo, &up, warm, opts);
        *pivots += clean.pivots;
        let (obj, point) = if clean.status == SolveStatus::Optimal {
            (clean.objective, clean.x)
        } else {
            let mut p = x.to_vec();
            for &j in &binaries {
                p[j] = p[j].round();
            }
            (lp.objective_value(&p), p)
        };
        let beats_cutoff = cutoff.is_none_or(|c| obj < c - S::lit(1e-9) * c.abs().max(S::one()));
        if beats_cutoff && incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
            *incumbent = Some((obj, point));
        }
    };

    if dominated(root.objective, &incumbent) {
        return Ok(SolveResult {
            nodes: 1,
            ..SolveResult::without_point(SolveStatus::Infeasible, pivots)
        });
    }
    if most_fractional(&binaries, &root.x).is_none() {
        offer(
            &root.x,
            &lower,
            &upper,
            root_basis.as_ref(),
            &mut incumbent,
            &mut pivots,
        );
    } else {
        heap.push(Node {
            bound: root.objective,
            depth: 0,
            seq,
            lower,
            upper,
            x: root.x,
            basis: root_basis,
        });
    }

    let mut limit_hit = false;
    'search: while let Some(node) = heap.pop() {
        if dominated(node.bound, &incumbent) {
            heap.clear();
            break;
        }
        let Some(j) = costs.select(&binaries, &node.x) else {
            continue;
        };
        for value in [S::zero(), S::one()] {
            if nodes >= opts.max_nodes {
                heap.push(node);
                limit_hit = true;
                break 'search;
            }
            let mut lo = node.lower.clone();
            let mut up = node.upper.clone();
            lo[j] = value;
            up[j] = value;
            let (child, child_basis) = solve_warm(lp, &lo, &up, node.basis.as_ref(), opts);
            nodes += 1;
            pivots += child.pivots;
            match child.status {
                SolveStatus::Optimal => {
                    let up = value == S::one();
                    let distance = if up { S::one() - node.x[j] } else { node.x[j] };
                    costs.record(j, up, distance, child.objective - node.bound);
                }
                SolveStatus::Infeasible => continue,
                _ => {
                    numeric_trouble = true;
                    continue;
                }
            }
            if dominated(child.objective, &incumbent) {
                continue;
            }
            if most_fractional(&binaries, &child.x).is_none() {
                offer(
                    &child.x,
                    &lo,
                    &up,
                    child_basis.as_ref(),
                    &mut incumbent,
                    &mut pivots,
                );
            } else {
                seq += 1;
                heap.push(Node {
                    bound: child.objective,
                    depth: node.depth + 1,
                    seq,
                    lower: lo,
                    upper: up,
                    x: child.x,
                    basis: child_basis,
                });
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .fold(S::infinity(), |a, b| a.min(b));
    let result = match incumbent {
        Some((objective, x)) => {
            let status = if limit_hit {
                SolveStatus::NodeLimit
            } else if numeric_trouble {
                SolveStatus::IterLimit
            } else {
                SolveStatus::Optimal
            };
            let gap = if limit_hit {
                (objective - open_bound).max(S::zero())
            } else {
                S::zero()
            };
            SolveResult {
                status,
                objective,
                x,
                gap,
                pivots,
                nodes,
            }
        }
        None => {
            let status = if limit_hit {
                SolveStatus::NodeLimit
            } else if numeric_trouble {
                SolveStatus::IterLimit
            } else {
                SolveStatus::Infeasible
            };
            SolveResult {
                nodes,
                ..SolveResult::without_point(status, pivots)
            }
        }
    };
    Ok(result)
}

/// Fixes every binary variable to the given value and searches for any
/// feasible point of the remaining LP (phase 1 only).
pub fn check_feasibility<S: Scalar>(
    lp: &LinearProgram<S>,
    fixed: &[(VarId, bool)],
) -> Result<SolveResult<S>, LpError> {
    check_feasibility_with(lp, fixed, &SolverOptions::default())
}

pub fn check_feasibility_with<S: Scalar>(
    lp: &LinearProgram<S>,
    fixed: &[(VarId, bool)],
    opts: &SolverOptions,
) -> Result<SolveResult<S>, LpError> {
    lp.validate()?;
    let mut lower: Vec<S> = lp.vars.iter().map(|v| v.lower).collect();
    let mut upper: Vec<S> = lp.vars.iter().map(|v| v.upper).collect();
    let mut covered = vec![false; lp.vars.len()];
    for &(j, value) in fixed {
        if j >= lp.vars.len() || !lp.vars[j].binary {
            return Err(LpError::NotBinary(j));
        }
        let v = if value { S::one() } else { S::zero() };
        lower[j] = v;
        upper[j] = v;
        covered[j] = true;
    }
    if let Some(j) = lp.binaries().find(|&j| !covered[j]) {
        return Err(LpError::MissingFixing(j));
    }
    Ok(solve_bounded(lp, &lower, &upper, true, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpkit::{solve_lp, Relation};

    /// Loss of a single node with threshold 1, value 1 and fixed resource r.
    fn single_node(r: f64) -> LinearProgram<f64> {
        let mut lp = LinearProgram::new();
        let x = lp.add_binary("x");
        lp.add_constraint("power", vec![(x, -1.0)], Relation::Ge, -r);
        lp.set_objective(vec![(x, -1.0)], 1.0);
        lp
    }

    #[test]
    fn integrality_gap_example() {
        let lp = single_node(0.9);
        let relax = solve_lp(&lp).unwrap();
        assert!((relax.objective - 0.1).abs() < 1e-9);
        let mip = solve_mip(&lp).unwrap();
        assert_eq!(mip.status, SolveStatus::Optimal);
        assert!((mip.objective - 1.0).abs() < 1e-9);
        assert_eq!(mip.x[0], 0.0);
    }

    #[test]
    fn no_binaries_matches_lp() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, 4.0);
        let y = lp.add_var("y", 0.0, 4.0);
        lp.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 3.0);
        lp.set_objective(vec![(x, 2.0), (y, 1.0)], 0.0);
        let a = solve_lp(&lp).unwrap();
        let b = solve_mip(&lp).unwrap();
        assert_eq!(b.status, SolveStatus::Optimal);
        assert!((a.objective - b.objective).abs() < 1e-12);
    }

    #[test]
    fn knapsack() {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 4  -> a + c = 8
        let mut lp = LinearProgram::<f64>::new();
        let a = lp.add_binary("a");
        let b = lp.add_binary("b");
        let c = lp.add_binary("c");
        lp.add_constraint("w", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Relation::Le, 4.0);
        lp.set_objective(vec![(a, -5.0), (b, -4.0), (c, -3.0)], 0.0);
        let r = solve_mip(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective + 8.0).abs() < 1e-9);
        assert_eq!(r.x, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn infeasible_mip() {
        let mut lp = LinearProgram::<f64>::new();
        let a = lp.add_binary("a");
        let b = lp.add_binary("b");
        lp.add_constraint("c", vec![(a, 1.0), (b, 1.0)], Relation::Eq, 1.5);
        assert_eq!(solve_mip(&lp).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn node_limit_reports_gap() {
        let mut lp = LinearProgram::<f64>::new();
        let vars: Vec<_> = (0..8).map(|i| lp.add_binary(format!("b{i}"))).collect();
        lp.add_constraint(
            "w",
            vars.iter().map(|&v| (v, 2.0)).collect(),
            Relation::Le,
            7.0,
        );
        lp.set_objective(vars.iter().map(|&v| (v, -1.0)).collect(), 0.0);
        let opts = SolverOptions {
            max_nodes: 2,
            ..SolverOptions::default()
        };
        let r = solve_mip_with(&lp, &opts).unwrap();
        assert_eq!(r.status, SolveStatus::NodeLimit);
        assert!(r.gap >= 0.0);
        let full = solve_mip(&lp).unwrap();
        assert!((full.objective + 3.0).abs() < 1e-9);
    }

    fn knapsack_lp(n: usize) -> LinearProgram<f64> {
        // values 3..3+n, weights 2..2+n, capacity about a third of the total
        let mut lp = LinearProgram::<f64>::new();
        let vars: Vec<_> = (0..n).map(|i| lp.add_binary(format!("b{i}"))).collect();
        let cap = (0..n).map(|i| 2.0 + i as f64).sum::<f64>() / 3.0;
        lp.add_constraint(
            "w",
            vars.iter()
                .enumerate()
                .map(|(i, &v)| (v, 2.0 + i as f64))
                .collect(),
            Relation::Le,
            cap,
        );
        lp.set_objective(
            vars.iter()
                .enumerate()
                .map(|(i, &v)| (v, -(3.0 + i as f64)))
                .collect(),
            0.0,
        );
        lp
    }

    #[test]
    fn objective_step_keeps_the_optimum() {
        let lp = knapsack_lp(12);
        let plain = solve_mip(&lp).unwrap();
        let stepped = solve_mip_with(
            &lp,
            &SolverOptions {
                objective_step: Some(1.0),
                ..SolverOptions::default()
            },
        )
        .unwrap();
        assert_eq!(stepped.status, SolveStatus::Optimal);
        assert!((plain.objective - stepped.objective).abs() < 1e-9);
        assert!(stepped.nodes <= plain.nodes);
    }

    #[test]
    fn cutoff_filters_points() {
        let lp = knapsack_lp(8);
        let best = solve_mip(&lp).unwrap().objective;
        let with = |cutoff: f64| {
            solve_mip_with(
                &lp,
                &SolverOptions {
                    cutoff: Some(cutoff),
                    ..SolverOptions::default()
                },
            )
            .unwrap()
        };
        let above = with(best + 0.5);
        assert_eq!(above.status, SolveStatus::Optimal);
        assert!((above.objective - best).abs() < 1e-9);
        assert_eq!(with(best).status, SolveStatus::Infeasible);
    }

    #[test]
    fn feasibility_requires_full_fixing() {
        let lp = single_node(0.9);
        assert_eq!(
            check_feasibility(&lp, &[]).unwrap_err(),
            LpError::MissingFixing(0)
        );
        assert_eq!(
            check_feasibility(&lp, &[(0, true)]).unwrap().status,
            SolveStatus::Infeasible
        );
        assert_eq!(
            check_feasibility(&lp, &[(0, false)]).unwrap().status,
            SolveStatus::Optimal
        );
    }

    #[test]
    fn empty_feasibility() {
        let lp = LinearProgram::<f64>::new();
        let r = check_feasibility(&lp, &[]).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
    }
}
