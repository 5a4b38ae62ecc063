use std::collections::BTreeMap;

use super::{Instance, ModelError};
use crate::Scalar;

/// Pre-attack resource per node.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationStrategy<S> {
    pub r: Vec<S>,
}

impl<S: Scalar> AllocationStrategy<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            r: vec![S::zero(); n],
        }
    }

    pub fn total(&self) -> S {
        self.r.iter().copied().sum()
    }

    pub fn validate(&self, inst: &Instance<S>) -> Result<(), ModelError> {
        if self.r.len() != inst.n() {
            return Err(ModelError::Infeasible(vec![format!(
                "allocation has {} entries for {} nodes",
                self.r.len(),
                inst.n()
            )]));
        }
        let tol = S::feas_tol();
        let mut issues = Vec::new();
        for (v, &rv) in self.r.iter().enumerate() {
            if !rv.is_finite() || rv < -tol {
                issues.push(format!("r[{v}] = {rv} is negative or not finite"));
            }
        }
        let total = self.total();
        if total > inst.budget() + tol {
            issues.push(format!(
                "allocation uses {total}, budget is {}",
                inst.budget()
            ));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Infeasible(issues))
        }
    }
}

/// Transfers deployed in response to an attack at `attacked`; keys are
/// `(sender, receiver)` slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ReallocationStrategy<S> {
    pub attacked: usize,
    pub transfers: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> ReallocationStrategy<S> {
    pub fn null(attacked: usize) -> Self {
        Self {
            attacked,
            transfers: BTreeMap::new(),
        }
    }

    pub fn get(&self, from: usize, to: usize) -> S {
        self.transfers
            .get(&(from, to))
            .copied()
            .unwrap_or_else(S::zero)
    }

    pub fn outflow(&self, v: usize) -> S {
        self.transfers
            .range((v, 0)..(v + 1, 0))
            .map(|(_, &t)| t)
            .sum()
    }

    pub fn validate(
        &self,
        inst: &Instance<S>,
        alloc: &AllocationStrategy<S>,
    ) -> Result<(), ModelError> {
        inst.check_node(self.attacked)?;
        let tol = S::feas_tol();
        let mut issues = Vec::new();
        for (&(from, to), &t) in &self.transfers {
            let Some(w) = inst.slot_weight(from, to) else {
                issues.push(format!(
                    "attack {}: no transfer slot {from} -> {to}",
                    self.attacked
                ));
                continue;
            };
            if !t.is_finite() || t < -tol {
                issues.push(format!(
                    "attack {}: t({from},{to}) = {t} is negative or not finite",
                    self.attacked
                ));
            }
            let cap = w * alloc.r[from];
            if t > cap + tol {
                issues.push(format!(
                    "attack {}: t({from},{to}) = {t} exceeds edge cap {cap}",
                    self.attacked
                ));
            }
        }
        let mut senders: Vec<usize> = self.transfers.keys().map(|&(f, _)| f).collect();
        senders.dedup();
        for v in senders {
            if v >= alloc.r.len() {
                continue;
            }
            let out = self.outflow(v);
            if out > alloc.r[v] + tol {
                issues.push(format!(
                    "attack {}: node {v} sends {out}, owns {}",
                    self.attacked, alloc.r[v]
                ));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Infeasible(issues))
        }
    }
}

/// An allocation plus one reallocation per potential attack node.
#[derive(Debug, Clone, PartialEq)]
pub struct DefendingStrategy<S> {
    pub allocation: AllocationStrategy<S>,
    pub reallocations: Vec<ReallocationStrategy<S>>,
}

impl<S: Scalar> DefendingStrategy<S> {
    /// Allocation with no transfers for any attack.
    pub fn without_reallocation(allocation: AllocationStrategy<S>) -> Self {
        let reallocations = (0..allocation.r.len())
            .map(ReallocationStrategy::null)
            .collect();
        Self {
            allocation,
            reallocations,
        }
    }

    pub fn validate(&self, inst: &Instance<S>) -> Result<(), ModelError> {
        self.allocation.validate(inst)?;
        if self.reallocations.len() != inst.n() {
            return Err(ModelError::Infeasible(vec![format!(
                "{} reallocations for {} nodes",
                self.reallocations.len(),
                inst.n()
            )]));
        }
        let mut issues = Vec::new();
        for (u, t) in self.reallocations.iter().enumerate() {
            if t.attacked != u {
                return Err(ModelError::AttackMismatch {
                    expected: u,
                    found: t.attacked,
                });
            }
            if let Err(ModelError::Infeasible(mut more)) = t.validate(inst, &self.allocation) {
                issues.append(&mut more);
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Infeasible(issues))
        }
    }
}

/// Per-attack losses and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DefenseOutcome<S> {
    pub loss: Vec<S>,
    pub defending_result: S,
}
