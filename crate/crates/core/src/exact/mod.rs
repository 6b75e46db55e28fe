//! Sampling-free evaluation of expected influence.
//!
//! On acyclic networks `E[X_v^t(A, Â)]` equals the probability that a random
//! walk from `v`, moving along `u` with probability `b_vu`, either sits in `A`
//! at time `t` or has touched `Â` by time `t`. The [`cells`] oracle computes
//! the same expectations by integrating over threshold space and also works
//! on cyclic networks.

pub mod cells;

pub use cells::{
    exact_indicators_cell_product, exact_indicators_cells, exact_influence_cells, CellEvaluation,
    CellPartition, DEFAULT_CELL_BUDGET,
};

use alloc::vec::Vec;

use crate::diffusion::SeedSets;
use crate::error::{Error, Result};
use crate::network::{InfoNetwork, NodeId};

/// Probabilities indexed by `(t, v)` for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachTable {
    horizon: usize,
    nodes: usize,
    q: Vec<f64>,
}

impl ReachTable {
    pub(crate) fn new(horizon: usize, nodes: usize, q: Vec<f64>) -> Self {
        debug_assert_eq!(q.len(), (horizon + 1) * nodes);
        ReachTable { horizon, nodes, q }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn get(&self, t: usize, v: NodeId) -> f64 {
        self.q[t * self.nodes + v.index()]
    }

    /// All entries, time-major.
    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.q[t * self.nodes..(t + 1) * self.nodes]
    }

    /// `(1/T) Σ_{t=1..T} Σ_v q[t][v]` over counted nodes.
    pub fn influence(&self, net: &InfoNetwork) -> f64 {
        let mut total = 0.0;
        for t in 1..=self.horizon {
            for v in net.counted_nodes() {
                total += self.get(t, v);
            }
        }
        total / self.horizon as f64
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &ReachTable) -> f64 {
        assert_eq!(self.q.len(), other.q.len(), "tables have different shapes");
        self.q
            .iter()
            .zip(&other.q)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }
}

fn mask(net: &InfoNetwork, set: &[NodeId]) -> Vec<bool> {
    let mut m = alloc::vec![false; net.node_count()];
    for v in set {
        m[v.index()] = true;
    }
    m
}

/// Backward walk recursion over `t = 0..=horizon`.
///
/// `q[0][v] = [v ∈ target ∪ absorb]`; afterwards nodes in `absorb` stay at
/// one and every other node averages its out-neighbors' previous row. The
/// result is `Pr[R_v^t(target) ∪ S_v^t(absorb)]` for every `(t, v)`.
pub(crate) fn walk_table(
    net: &InfoNetwork,
    target: &[bool],
    absorb: &[bool],
    horizon: usize,
) -> ReachTable {
    let n = net.node_count();
    let mut q = alloc::vec![0.0; (horizon + 1) * n];
    for v in 0..n {
        q[v] = if target[v] || absorb[v] { 1.0 } else { 0.0 };
    }
    for t in 1..=horizon {
        let (done, rest) = q.split_at_mut(t * n);
        let prev = &done[(t - 1) * n..];
        for v in 0..n {
            rest[v] = if absorb[v] {
                1.0
            } else {
                let (targets, weights) = net.adjacency(v);
                targets
                    .iter()
                    .zip(weights)
                    .map(|(u, w)| w * prev[u.index()])
                    .sum()
            };
        }
    }
    ReachTable::new(horizon, n, q)
}

/// `Pr[R_source^t(targets)]`: the walk from `source` is in `targets` at exactly time `t`.
pub fn reach_prob(net: &InfoNetwork, source: NodeId, targets: &[NodeId], t: usize) -> f64 {
    let none = alloc::vec![false; net.node_count()];
    walk_table(net, &mask(net, targets), &none, t).get(t, source)
}

/// `Pr[S_source^t(targets)]`: the walk from `source` touches `targets` at or before time `t`.
pub fn pass_prob(net: &InfoNetwork, source: NodeId, targets: &[NodeId], t: usize) -> f64 {
    let none = alloc::vec![false; net.node_count()];
    walk_table(net, &none, &mask(net, targets), t).get(t, source)
}

/// Forward occupancy distribution of the walk from `source` after `t` steps,
/// void included.
pub fn walk_distribution(net: &InfoNetwork, source: NodeId, t: usize) -> Vec<f64> {
    let n = net.node_count();
    let mut p = alloc::vec![0.0; n];
    p[source.index()] = 1.0;
    for _ in 0..t {
        let mut next = alloc::vec![0.0; n];
        for (v, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (targets, weights) = net.adjacency(v);
            for (u, w) in targets.iter().zip(weights) {
                next[u.index()] += mass * w;
            }
        }
        p = next;
    }
    p
}

/// Expected activity `E[X_v^t(A, Â)]` for every `(t, v)` on an acyclic network.
///
/// Cost is `O(T · |E|)`. Refuses cyclic networks, where the walk identity
/// does not hold.
pub fn expected_indicator_dag(
    net: &InfoNetwork,
    seeds: &SeedSets,
    horizon: usize,
) -> Result<ReachTable> {
    if !net.is_acyclic() {
        return Err(net.cyclic_error());
    }
    let (transient, permanent) = seeds.masks(net.node_count());
    Ok(walk_table(net, &transient, &permanent, horizon))
}

/// Expected influence `σ̄(A, Â)` on an acyclic network.
pub fn expected_influence_dag(net: &InfoNetwork, seeds: &SeedSets, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(expected_indicator_dag(net, seeds, horizon)?.influence(net))
}

/// Gain in `σ̄` from adding `w` as a transient seed, computed directly as
/// `(1/T) Σ_t Σ_v Pr[R_v^t({w}) \ S_v^t(Â)]`: walks are killed on entering a
/// permanent seed. Independent of the current transient set.
pub fn transient_gain_dag(
    net: &InfoNetwork,
    seeds: &SeedSets,
    w: NodeId,
    horizon: usize,
) -> Result<f64> {
    if !net.is_acyclic() {
        return Err(net.cyclic_error());
    }
    if seeds.contains(w) {
        return Err(Error::CandidateAlreadySeeded(net.label(w).into()));
    }
    if net.is_void(w) {
        return Err(Error::VoidInSeedSet);
    }
    let n = net.node_count();
    let (_, permanent) = seeds.masks(n);
    let mut prev = alloc::vec![0.0; n];
    prev[w.index()] = 1.0;
    let mut total = 0.0;
    for _ in 1..=horizon {
        let mut next = alloc::vec![0.0; n];
        for v in 0..n {
            if permanent[v] {
                continue;
            }
            let (targets, weights) = net.adjacency(v);
            next[v] = targets
                .iter()
                .zip(weights)
                .map(|(u, x)| x * prev[u.index()])
                .sum();
        }
        total += net.counted_nodes().map(|v| next[v.index()]).sum::<f64>();
        prev = next;
    }
    Ok(total / horizon as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::random_dag;
    use crate::network::transform_permanent;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn chain() -> InfoNetwork {
        InfoNetwork::build(&["a", "b"], &[("b", "a", 1.0)]).unwrap()
    }

    fn diamond() -> InfoNetwork {
        InfoNetwork::build(&["v", "u1", "u2"], &[("v", "u1", 0.5), ("v", "u2", 0.5)]).unwrap()
    }

    fn id(net: &InfoNetwork, l: &str) -> NodeId {
        net.resolve(l).unwrap()
    }

    #[test]
    fn reach_examples() {
        let c = chain();
        assert_eq!(reach_prob(&c, id(&c, "b"), &[id(&c, "b")], 0), 1.0);
        assert_eq!(reach_prob(&c, id(&c, "b"), &[id(&c, "a")], 1), 1.0);
        let d = diamond();
        assert_eq!(reach_prob(&d, id(&d, "v"), &[id(&d, "u1")], 1), 0.5);
    }

    #[test]
    fn pass_examples() {
        let d = diamond();
        let v = id(&d, "v");
        for t in 0..5 {
            assert_eq!(pass_prob(&d, v, &[v], t), 1.0);
            assert_eq!(pass_prob(&d, v, &[], t), 0.0);
        }
        // Walk paths: v→u1 (1/2) then void, v→u2 (1/2) then void.
        assert_eq!(pass_prob(&d, v, &[id(&d, "u1")], 3), 0.5);
        assert_eq!(reach_prob(&d, v, &[id(&d, "u1")], 3), 0.0);
    }

    #[test]
    fn forward_distribution_conserves_mass() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        for _ in 0..50 {
            let net = random_dag(&mut rng, 7, 14);
            for t in 0..6 {
                let p = walk_distribution(&net, NodeId::new(0), t);
                let s: f64 = p.iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                // Forward and backward formulations agree.
                let target = NodeId::new(rng.random_range(0..net.node_count()));
                let back = reach_prob(&net, NodeId::new(0), &[target], t);
                assert!((back - p[target.index()]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chain_expectation() {
        let c = chain();
        let seeds = SeedSets::from_labels(&c, &["a"], &[]).unwrap();
        let table = expected_indicator_dag(&c, &seeds, 2).unwrap();
        assert_eq!(table.get(1, id(&c, "b")), 1.0);
        assert_eq!(table.get(2, id(&c, "b")), 0.0);
        assert_eq!(table.get(1, id(&c, "a")), 0.0);
        assert_eq!(expected_influence_dag(&c, &seeds, 2).unwrap(), 0.5);
    }

    #[test]
    fn empty_and_full_seeds() {
        let d = diamond();
        assert_eq!(expected_influence_dag(&d, &SeedSets::empty(), 4).unwrap(), 0.0);
        let all: Vec<NodeId> = d.counted_nodes().collect();
        let seeds = SeedSets::new(&d, [], all).unwrap();
        assert_eq!(expected_influence_dag(&d, &seeds, 4).unwrap(), 3.0);
        let s = SeedSets::from_labels(&d, &["u1"], &[]).unwrap();
        assert_eq!(expected_indicator_dag(&d, &s, 1).unwrap().get(1, id(&d, "v")), 0.5);
    }

    #[test]
    fn cyclic_input_is_refused() {
        let net = InfoNetwork::build(&["a", "b"], &[("a", "b", 0.5), ("b", "a", 0.5)]).unwrap();
        assert!(matches!(
            expected_influence_dag(&net, &SeedSets::empty(), 2),
            Err(Error::CyclicNetwork { .. })
        ));
    }

    #[test]
    fn transient_only_table_is_reach_probability() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        for _ in 0..30 {
            let net = random_dag(&mut rng, 6, 12);
            let u = NodeId::new(rng.random_range(0..net.node_count() - 1));
            let seeds = SeedSets::new(&net, [u], []).unwrap();
            let table = expected_indicator_dag(&net, &seeds, 4).unwrap();
            for t in 0..=4 {
                for v in net.nodes() {
                    assert!((table.get(t, v) - reach_prob(&net, v, &[u], t)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn union_decomposition() {
        // Pr[R(A ∪ {w}) ∪ S(Â)] - Pr[R(A) ∪ S(Â)] = Pr[R({w}) \ S(Â)]
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..100 {
            let net = random_dag(&mut rng, 7, 14);
            let nodes: Vec<NodeId> = net.non_void_nodes().collect();
            let pick = |rng: &mut Xoshiro256PlusPlus| -> Vec<NodeId> {
                nodes.iter().copied().filter(|_| rng.random_bool(0.3)).collect()
            };
            let seeds = SeedSets::new(&net, pick(&mut rng), pick(&mut rng)).unwrap();
            let Some(&w) = nodes.iter().find(|&&v| !seeds.contains(v)) else { continue };
            let t = 3;
            let base = expected_influence_dag(&net, &seeds, t).unwrap();
            let more = expected_influence_dag(&net, &seeds.with_transient(w), t).unwrap();
            let gain = transient_gain_dag(&net, &seeds, w, t).unwrap();
            assert!(gain >= 0.0);
            assert!((more - base - gain).abs() < 1e-9);
        }
    }

    #[test]
    fn dummy_chain_shifts_reach_probability() {
        // Reaching the i-th dummy of D_y at time t equals reaching y at t - i.
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
        for _ in 0..40 {
            let net = random_dag(&mut rng, 6, 12);
            let y = NodeId::new(rng.random_range(0..net.node_count() - 1));
            let horizon = 4;
            let tr = transform_permanent(&net, &[y], horizon).unwrap();
            let chain = &tr.chains[0].1;
            for v in net.non_void_nodes() {
                for t in 0..=horizon {
                    for (i, &d) in chain.iter().enumerate() {
                        let i = i + 1;
                        let lhs = reach_prob(&tr.network, v, &[d], t);
                        let rhs = if i > t { 0.0 } else { reach_prob(&tr.network, v, &[y], t - i) };
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
