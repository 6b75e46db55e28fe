//! Seed selection under a budget shared by transient and permanent seeds.
//!
//! For every number `k` of transient seeds the budget allows, the remaining
//! money buys `k̂ = ⌊(K - k·c) / ĉ⌋` permanent seeds. Each split is a
//! partition matroid `{|A| ≤ k, |Â| ≤ k̂}` over elements `(node, role)`, and
//! the greedy algorithm runs on each; the best split wins.

mod brute;
mod greedy;

pub use brute::{brute_force_opt, DEFAULT_SEARCH_LIMIT};
pub use greedy::greedy_max;

use alloc::string::String;
use alloc::vec::Vec;

use crate::diffusion::{monte_carlo_influence, SeedSets};
use crate::error::{Error, Result};
use crate::exact::{self, exact_indicators_cells, transient_gain_dag};
use crate::network::{InfoNetwork, NodeId};

/// Budget `K` with per-node transient cost `c` and permanent cost `ĉ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub total: f64,
    pub transient_cost: f64,
    pub permanent_cost: f64,
}

impl Budget {
    pub fn new(total: f64, transient_cost: f64, permanent_cost: f64) -> Result<Self> {
        if !(total >= 0.0 && total.is_finite()) {
            return Err(Error::InvalidArgument("budget must be a finite non-negative number".into()));
        }
        if !(transient_cost > 0.0 && transient_cost.is_finite())
            || !(permanent_cost > 0.0 && permanent_cost.is_finite())
        {
            return Err(Error::InvalidArgument("seed costs must be positive and finite".into()));
        }
        Ok(Budget {
            total,
            transient_cost,
            permanent_cost,
        })
    }

    pub fn allows(&self, transient: usize, permanent: usize) -> bool {
        self.transient_cost * transient as f64 + self.permanent_cost * permanent as f64 <= self.total
    }

    /// Feasible `(k, k̂)` pairs with `k` from zero upward, each capped at
    /// `cap` nodes, duplicates removed.
    pub fn splits(&self, cap: usize) -> Vec<(usize, usize)> {
        let mut k_max = libm::floor(self.total / self.transient_cost) as usize;
        while k_max > 0 && !self.allows(k_max, 0) {
            k_max -= 1;
        }
        let mut out: Vec<(usize, usize)> = Vec::new();
        for k in 0..=k_max {
            let left = self.total - self.transient_cost * k as f64;
            let mut k_hat = libm::floor(left.max(0.0) / self.permanent_cost) as usize;
            while k_hat > 0 && !self.allows(k, k_hat) {
                k_hat -= 1;
            }
            let pair = (k.min(cap), k_hat.min(cap));
            if !out.contains(&pair) {
                out.push(pair);
            }
            if k >= cap {
                break;
            }
        }
        out
    }
}

/// How `σ̄` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    /// Walk recursion; acyclic networks only.
    ExactDag,
    /// Threshold-cell integration with a cap on visited boxes.
    Cells { budget: u64 },
    /// Sample mean with a fixed seed, so repeated calls use common random numbers.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Evaluator {
    pub fn tag(&self) -> &'static str {
        match self {
            Evaluator::ExactDag => "exact-dag",
            Evaluator::Cells { .. } => "cells",
            Evaluator::MonteCarlo { .. } => "monte-carlo",
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Evaluator::MonteCarlo { .. })
    }

    /// Fails early when the evaluator cannot handle `net`.
    pub fn check(&self, net: &InfoNetwork) -> Result<()> {
        match self {
            Evaluator::ExactDag if !net.is_acyclic() => Err(net.cyclic_error()),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, net: &InfoNetwork, seeds: &SeedSets, horizon: usize) -> Result<f64> {
        match *self {
            Evaluator::ExactDag => exact::expected_influence_dag(net, seeds, horizon),
            Evaluator::Cells { budget } => {
                if horizon == 0 {
                    return Err(Error::InvalidArgument("horizon must be at least 1".into()));
                }
                Ok(exact_indicators_cells(net, seeds, horizon, budget)?
                    .table
                    .influence(net))
            }
            Evaluator::MonteCarlo { samples, seed } => {
                Ok(monte_carlo_influence(net, seeds, horizon, samples, seed)?.mean)
            }
        }
    }
}

/// Role of a seed. Declaration order is the greedy tie-break: permanent first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Permanent,
    Transient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub node: NodeId,
    pub role: Role,
}

impl Candidate {
    pub fn apply(&self, seeds: &SeedSets) -> SeedSets {
        match self.role {
            Role::Transient => seeds.with_transient(self.node),
            Role::Permanent => seeds.with_permanent(self.node),
        }
    }
}

/// Result of an optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub seeds: SeedSets,
    pub value: f64,
    pub evaluator: &'static str,
    pub evaluations: u64,
    /// Transient and permanent capacities of the winning split.
    pub k: usize,
    pub k_hat: usize,
}

impl Solution {
    pub fn transient_labels(&self, net: &InfoNetwork) -> Vec<String> {
        self.seeds.transient().iter().map(|&v| net.label(v).into()).collect()
    }

    pub fn permanent_labels(&self, net: &InfoNetwork) -> Vec<String> {
        self.seeds.permanent().iter().map(|&v| net.label(v).into()).collect()
    }
}

/// `σ̄(seeds + candidate) - σ̄(seeds)`.
///
/// Under [`Evaluator::ExactDag`] a transient gain is computed directly from
/// walks killed on the permanent set instead of by two evaluations.
pub fn marginal_gain(
    net: &InfoNetwork,
    seeds: &SeedSets,
    candidate: Candidate,
    horizon: usize,
    evaluator: Evaluator,
) -> Result<f64> {
    gain_over(net, seeds, None, candidate, horizon, evaluator)
}

/// [`marginal_gain`] reusing `base = σ̄(seeds)` when the caller has it.
pub(crate) fn gain_over(
    net: &InfoNetwork,
    seeds: &SeedSets,
    base: Option<f64>,
    candidate: Candidate,
    horizon: usize,
    evaluator: Evaluator,
) -> Result<f64> {
    if seeds.contains(candidate.node) {
        return Err(Error::CandidateAlreadySeeded(net.label(candidate.node).into()));
    }
    match (evaluator, candidate.role) {
        (Evaluator::ExactDag, Role::Transient) => transient_gain_dag(net, seeds, candidate.node, horizon),
        _ => {
            let with = evaluator.evaluate(net, &candidate.apply(seeds), horizon)?;
            let without = match base {
                Some(b) => b,
                None => evaluator.evaluate(net, seeds, horizon)?,
            };
            Ok(with - without)
        }
    }
}

/// Rank of each node by label, used for tie-breaking.
pub(crate) fn label_ranks(net: &InfoNetwork) -> Vec<usize> {
    let mut order: Vec<NodeId> = net.non_void_nodes().collect();
    order.sort_by(|&a, &b| net.label(a).cmp(net.label(b)));
    let mut rank = alloc::vec![usize::MAX; net.node_count()];
    for (r, v) in order.into_iter().enumerate() {
        rank[v.index()] = r;
    }
    rank
}

/// Nodes that may be seeded: counted, non-void.
pub(crate) fn seedable(net: &InfoNetwork) -> Vec<NodeId> {
    net.counted_nodes().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::random_dag;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn budget_splits() {
        let b = Budget::new(3.0, 1.0, 2.0).unwrap();
        assert_eq!(b.splits(10), [(0, 1), (1, 1), (2, 0), (3, 0)]);
        let b = Budget::new(0.3, 0.1, 0.1).unwrap();
        for (k, kh) in b.splits(10) {
            assert!(b.allows(k, kh));
        }
        assert_eq!(Budget::new(0.5, 1.0, 1.0).unwrap().splits(4), [(0, 0)]);
        assert_eq!(Budget::new(100.0, 1.0, 1.0).unwrap().splits(2), [(0, 2), (1, 2), (2, 2)]);
        assert!(Budget::new(-1.0, 1.0, 1.0).is_err());
        assert!(Budget::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn gain_from_empty_is_the_value() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(8);
        let net = random_dag(&mut rng, 6, 10);
        let w = NodeId::new(2);
        for role in [Role::Transient, Role::Permanent] {
            let c = Candidate { node: w, role };
            let gain = marginal_gain(&net, &SeedSets::empty(), c, 3, Evaluator::ExactDag).unwrap();
            let value = Evaluator::ExactDag.evaluate(&net, &c.apply(&SeedSets::empty()), 3).unwrap();
            assert!((gain - value).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_candidate_is_rejected() {
        let net = InfoNetwork::build::<_, &str>(&["a", "b"], &[]).unwrap();
        let seeds = SeedSets::from_labels(&net, &["a"], &[]).unwrap();
        let c = Candidate {
            node: net.resolve("a").unwrap(),
            role: Role::Permanent,
        };
        assert!(matches!(
            marginal_gain(&net, &seeds, c, 2, Evaluator::ExactDag),
            Err(Error::CandidateAlreadySeeded(_))
        ));
    }

    #[test]
    fn gains_are_nonnegative_and_permanent_dominates() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        for _ in 0..40 {
            let net = random_dag(&mut rng, 7, 14);
            let nodes: Vec<NodeId> = net.non_void_nodes().collect();
            let a: Vec<NodeId> = nodes.iter().copied().filter(|_| rng.random_bool(0.25)).collect();
            let p: Vec<NodeId> = nodes.iter().copied().filter(|_| rng.random_bool(0.2)).collect();
            let seeds = SeedSets::new(&net, a, p).unwrap();
            let t = rng.random_range(1..=4);
            for &w in nodes.iter().filter(|&&v| !seeds.contains(v)) {
                let tr = marginal_gain(&net, &seeds, Candidate { node: w, role: Role::Transient }, t, Evaluator::ExactDag).unwrap();
                let pe = marginal_gain(&net, &seeds, Candidate { node: w, role: Role::Permanent }, t, Evaluator::ExactDag).unwrap();
                assert!(tr >= -1e-12);
                assert!(pe >= tr - 1e-12);
            }
        }
    }
}
