//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::DcaError;
use crate::netmodel::{Edge, Instance, NodeParams};
use crate::Scalar;

/// Sampling ranges for node and edge parameters. Thresholds and values are
/// integers drawn uniformly from the inclusive ranges; weights are uniform
/// reals.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub theta: (u32, u32),
    pub alpha: (u32, u32),
    pub weight: (f64, f64),
    pub k: usize,
    /// Budget as a fraction of the total threshold.
    pub budget_fraction: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            theta: (1, 10),
            alpha: (1, 10),
            weight: (0.3, 1.0),
            k: 1,
            budget_fraction: 0.5,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<(), DcaError> {
        let bad = |msg: &str| Err(DcaError::Config(msg.to_string()));
        if self.theta.0 > self.theta.1 || self.alpha.0 > self.alpha.1 {
            return bad("empty integer range");
        }
        let (lo, hi) = self.weight;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return bad("weight range must lie in [0, 1]");
        }
        if !(self.budget_fraction >= 0.0) || !self.budget_fraction.is_finite() {
            return bad("budget fraction must be nonnegative");
        }
        Ok(())
    }
}

fn assemble<S: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    pairs: Vec<(usize, usize)>,
    params: &GenParams,
) -> Result<Instance<S>, DcaError> {
    params.validate()?;
    let nodes: Vec<NodeParams<S>> = (0..n)
        .map(|_| NodeParams {
            theta: S::lit(rng.gen_range(params.theta.0..=params.theta.1) as f64),
            alpha: S::lit(rng.gen_range(params.alpha.0..=params.alpha.1) as f64),
        })
        .collect();
    let (lo, hi) = params.weight;
    let edges = pairs
        .into_iter()
        .map(|(u, v)| Edge {
            u,
            v,
            w: S::lit(if lo < hi { rng.gen_range(lo..=hi) } else { lo }),
        })
        .collect();
    let total: S = nodes.iter().map(|p| p.theta).sum();
    let budget = total * S::lit(params.budget_fraction);
    Ok(Instance::new(nodes, edges, false, params.k, budget)?)
}

/// Erdős–Rényi graph: every unordered pair is an edge independently with
/// probability `p`.
pub fn gen_gnp<S: Scalar>(
    n: usize,
    p: f64,
    seed: u64,
    params: &GenParams,
) -> Result<Instance<S>, DcaError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DcaError::Config(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    assemble(&mut rng, n, pairs, params)
}

/// Holme–Kim preferential attachment: each new node attaches `m` edges, and
/// after each attachment closes a triangle with probability `p_tri`.
pub fn gen_powerlaw<S: Scalar>(
    n: usize,
    m: usize,
    p_tri: f64,
    seed: u64,
    params: &GenParams,
) -> Result<Instance<S>, DcaError> {
    if m < 1 || m > n {
        return Err(DcaError::Config(format!(
            "need 1 <= m <= n, got m={m}, n={n}"
        )));
    }
    if !(0.0..=1.0).contains(&p_tri) {
        return Err(DcaError::Config(format!(
            "triangle probability {p_tri} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pairs = Vec::new();
    // one entry per unit of degree, plus the seed nodes once each
    let mut repeated: Vec<usize> = (0..m).collect();

    // a target already reached by triangle closing adds no second edge
    let connect =
        |adj: &mut Vec<Vec<usize>>, pairs: &mut Vec<(usize, usize)>, a: usize, b: usize| {
            if adj[a].contains(&b) {
                return;
            }
            adj[a].push(b);
            adj[b].push(a);
            pairs.push((a, b));
        };

    for source in m..n {
        let mut targets = distinct_sample(&mut rng, &repeated, m);
        let mut target = targets.pop().expect("m >= 1");
        connect(&mut adj, &mut pairs, source, target);
        repeated.push(target);
        let mut count = 1;
        while count < m {
            if rng.gen_bool(p_tri) {
                let closable: Vec<usize> = adj[target]
                    .iter()
                    .copied()
                    .filter(|&z| z != source && !adj[source].contains(&z))
                    .collect();
                if let Some(&z) = closable.choose(&mut rng) {
                    connect(&mut adj, &mut pairs, source, z);
                    repeated.push(z);
                    count += 1;
                    continue;
                }
            }
            target = targets.pop().expect("one target per attachment");
            connect(&mut adj, &mut pairs, source, target);
            repeated.push(target);
            count += 1;
        }
        repeated.extend(std::iter::repeat_n(source, m));
    }
    assemble(&mut rng, n, pairs, params)
}

/// `m` distinct elements drawn from `pool` with probability proportional to
/// multiplicity.
fn distinct_sample(rng: &mut ChaCha8Rng, pool: &[usize], m: usize) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::with_capacity(m);
    while picked.len() < m {
        let x = *pool.choose(rng).expect("non-empty pool");
        if !picked.contains(&x) {
            picked.push(x);
        }
    }
    picked
}

/// Vertex-cover reduction: every edge of the input graph is split by a new
/// zero-value node, all thresholds are 1, nothing can be transferred and the
/// attack reaches direct neighbours. Original nodes come first, splitting
/// nodes follow in edge order.
///
/// With budget `R`, the optimal defending result is at most 1 exactly when
/// the input graph has a vertex cover of size `R` (for integer `R`).
pub fn gen_vc_gadget<S: Scalar>(
    vc_n: usize,
    vc_edges: &[(usize, usize)],
    budget: S,
) -> Result<Instance<S>, DcaError> {
    let mut nodes = vec![
        NodeParams {
            theta: S::one(),
            alpha: S::one(),
        };
        vc_n
    ];
    let mut edges = Vec::with_capacity(2 * vc_edges.len());
    for (i, &(a, b)) in vc_edges.iter().enumerate() {
        let s = vc_n + i;
        nodes.push(NodeParams {
            theta: S::one(),
            alpha: S::zero(),
        });
        edges.push(Edge {
            u: a,
            v: s,
            w: S::zero(),
        });
        edges.push(Edge {
            u: s,
            v: b,
            w: S::zero(),
        });
    }
    Ok(Instance::new(nodes, edges, false, 1, budget)?)
}
