use std::collections::{BTreeSet, VecDeque};

use super::ModelError;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeParams<S> {
    /// Defending requirement.
    pub theta: S,
    /// Damage suffered when the node is insufficiently defended.
    pub alpha: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<S> {
    pub u: usize,
    pub v: usize,
    /// Fraction of a sender's resource that may cross this edge.
    pub w: S,
}

/// A network under contagious attack: thresholds, values, transfer weights,
/// contagion radius and total budget.
///
/// In undirected mode every edge opens a transfer slot in both directions with
/// the same weight. In directed mode edge `(u, v)` lets `u` send to `v`, and an
/// attack spreads along edge direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    nodes: Vec<NodeParams<S>>,
    edges: Vec<Edge<S>>,
    directed: bool,
    k: usize,
    budget: S,
    out_adj: Vec<Vec<(usize, S)>>,
    in_adj: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(
        nodes: Vec<NodeParams<S>>,
        edges: Vec<Edge<S>>,
        directed: bool,
        k: usize,
        budget: S,
    ) -> Result<Self, ModelError> {
        let n = nodes.len();
        if !(budget >= S::zero()) || !budget.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "budget must be finite and nonnegative, got {budget}"
            )));
        }
        for (id, p) in nodes.iter().enumerate() {
            if !(p.theta >= S::zero()) || !p.theta.is_finite() {
                return Err(ModelError::InvalidParameter(format!(
                    "node {id}: theta must be finite and nonnegative, got {}",
                    p.theta
                )));
            }
            if !(p.alpha >= S::zero()) || !p.alpha.is_finite() {
                return Err(ModelError::InvalidParameter(format!(
                    "node {id}: alpha must be finite and nonnegative, got {}",
                    p.alpha
                )));
            }
        }
        let mut seen = BTreeSet::new();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for e in &edges {
            if e.u >= n {
                return Err(ModelError::InvalidNode(e.u));
            }
            if e.v >= n {
                return Err(ModelError::InvalidNode(e.v));
            }
            if e.u == e.v {
                return Err(ModelError::SelfLoop(e.u));
            }
            if !(e.w >= S::zero() && e.w <= S::one()) {
                return Err(ModelError::InvalidParameter(format!(
                    "edge ({}, {}): weight must lie in [0, 1], got {}",
                    e.u, e.v, e.w
                )));
            }
            let key = if directed {
                (e.u, e.v)
            } else {
                (e.u.min(e.v), e.u.max(e.v))
            };
            if !seen.insert(key) {
                return Err(ModelError::DuplicateEdge(e.u, e.v));
            }
            out_adj[e.u].push((e.v, e.w));
            in_adj[e.v].push((e.u, e.w));
            if !directed {
                out_adj[e.v].push((e.u, e.w));
                in_adj[e.u].push((e.v, e.w));
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_by_key(|&(z, _)| z);
        }
        Ok(Self {
            nodes,
            edges,
            directed,
            k,
            budget,
            out_adj,
            in_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn budget(&self) -> S {
        self.budget
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn nodes(&self) -> &[NodeParams<S>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn theta(&self, v: usize) -> S {
        self.nodes[v].theta
    }

    pub fn alpha(&self, v: usize) -> S {
        self.nodes[v].alpha
    }

    /// Nodes `v` can send resource to, with the slot weight, sorted by id.
    pub fn out_neighbors(&self, v: usize) -> &[(usize, S)] {
        &self.out_adj[v]
    }

    /// Nodes that can send resource to `v`, with the slot weight, sorted by id.
    pub fn in_neighbors(&self, v: usize) -> &[(usize, S)] {
        &self.in_adj[v]
    }

    /// Weight of the transfer slot `from -> to`, if it exists.
    pub fn slot_weight(&self, from: usize, to: usize) -> Option<S> {
        let list = self.out_adj.get(from)?;
        list.binary_search_by_key(&to, |&(z, _)| z)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn check_node(&self, u: usize) -> Result<(), ModelError> {
        if u < self.n() {
            Ok(())
        } else {
            Err(ModelError::InvalidNode(u))
        }
    }

    /// Nodes within `k` hops of `u` along spread direction, sorted by id.
    pub fn k_neighborhood(&self, u: usize, k: usize) -> Result<Vec<usize>, ModelError> {
        self.check_node(u)?;
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        dist[u] = 0;
        queue.push_back(u);
        while let Some(v) = queue.pop_front() {
            if dist[v] == k {
                continue;
            }
            for &(z, _) in &self.out_adj[v] {
                if dist[z] == usize::MAX {
                    dist[z] = dist[v] + 1;
                    queue.push_back(z);
                }
            }
        }
        Ok((0..self.n()).filter(|&v| dist[v] != usize::MAX).collect())
    }

    /// `N_k(u)` for the instance's own contagion radius.
    pub fn attack_region(&self, u: usize) -> Result<Vec<usize>, ModelError> {
        self.k_neighborhood(u, self.k)
    }

    /// Largest possible loss of an attack at `u`: every value in its region.
    pub fn region_value(&self, u: usize) -> Result<S, ModelError> {
        Ok(self
            .attack_region(u)?
            .into_iter()
            .map(|v| self.alpha(v))
            .fold(S::zero(), |acc, a| acc + a))
    }

    pub fn total_theta(&self) -> S {
        self.nodes.iter().map(|p| p.theta).sum()
    }

    /// Lowest defending power `v` can be left with: it ships out as much as
    /// its slots allow.
    pub fn min_power(&self, v: usize, r: &[S]) -> S {
        let w_out: S = self.out_adj[v].iter().map(|&(_, w)| w).sum();
        (S::one() - w_out).max(S::zero()) * r[v]
    }

    /// Highest defending power `v` can reach: it keeps everything and every
    /// in-neighbour sends its full slot.
    pub fn max_power(&self, v: usize, r: &[S]) -> S {
        self.in_adj[v]
            .iter()
            .fold(r[v], |acc, &(z, w)| acc + w * r[z])
    }

    pub fn with_budget(&self, budget: S) -> Result<Self, ModelError> {
        Self::new(
            self.nodes.clone(),
            self.edges.clone(),
            self.directed,
            self.k,
            budget,
        )
    }

    pub fn with_k(&self, k: usize) -> Self {
        Self { k, ..self.clone() }
    }

    /// Same network with every transfer weight set to zero.
    pub fn isolated(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { w: S::zero(), ..*e })
            .collect();
        Self::new(
            self.nodes.clone(),
            edges,
            self.directed,
            self.k,
            self.budget,
        )
        .expect("zeroing weights keeps a valid instance")
    }
}
