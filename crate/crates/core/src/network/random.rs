use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{InfoNetwork, NodeKind};

/// Shape of a randomly generated network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomNetworkParams {
    pub nodes: usize,
    pub max_edges: usize,
    pub acyclic: bool,
    /// Permit self-loops on non-void nodes (only when `acyclic` is false).
    pub self_loops: bool,
    /// Chance that a node's out-weights sum to exactly one (no void edge).
    pub full_weight_probability: f64,
}

impl RandomNetworkParams {
    pub fn dag(nodes: usize, max_edges: usize) -> Self {
        RandomNetworkParams {
            nodes,
            max_edges,
            acyclic: true,
            self_loops: false,
            full_weight_probability: 0.3,
        }
    }

    pub fn cyclic(nodes: usize, max_edges: usize) -> Self {
        RandomNetworkParams {
            acyclic: false,
            ..Self::dag(nodes, max_edges)
        }
    }
}

fn node_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}

/// Draws a random network. Acyclic networks orient every edge along a random
/// permutation of the nodes.
pub fn random_network<R: Rng + ?Sized>(rng: &mut R, params: RandomNetworkParams) -> InfoNetwork {
    let n = params.nodes.max(1);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);

    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        for u in 0..n {
            let allowed = if params.acyclic {
                rank[v] > rank[u]
            } else {
                v != u || params.self_loops
            };
            if allowed {
                candidates.push((v, u));
            }
        }
    }
    candidates.shuffle(rng);
    let m = if params.max_edges == 0 {
        0
    } else {
        rng.random_range(0..=params.max_edges.min(candidates.len()))
    };
    let mut chosen = candidates[..m].to_vec();
    chosen.sort_unstable();

    let mut raw = Vec::with_capacity(m);
    let mut start = 0;
    while start < chosen.len() {
        let v = chosen[start].0;
        let end = start + chosen[start..].iter().take_while(|e| e.0 == v).count();
        let draws: Vec<f64> = (start..end).map(|_| rng.random_range(0.05..1.0)).collect();
        let slack = if rng.random_bool(params.full_weight_probability) {
            0.0
        } else {
            rng.random_range(0.05..1.0)
        };
        let total: f64 = draws.iter().sum::<f64>() + slack;
        for (e, d) in chosen[start..end].iter().zip(&draws) {
            raw.push((e.0, e.1, d / total));
        }
        start = end;
    }
    InfoNetwork::from_parts(node_labels(n), alloc::vec![NodeKind::Regular; n], raw)
        .expect("generated weights are normalized")
}

/// Random acyclic network with `n` nodes and at most `max_edges` edges.
pub fn random_dag<R: Rng + ?Sized>(rng: &mut R, n: usize, max_edges: usize) -> InfoNetwork {
    random_network(rng, RandomNetworkParams::dag(n, max_edges))
}

/// Builds a network over `n` nodes from a fixed edge structure and weights on
/// the grid `{0.1, ..., 0.9}` given as tenths. Returns `None` when some node's
/// weights exceed one.
pub fn quantized_weights(n: usize, edges: &[(usize, usize)], tenths: &[u8]) -> Option<InfoNetwork> {
    debug_assert_eq!(edges.len(), tenths.len());
    let mut per_node = alloc::vec![0u32; n];
    for (&(v, _), &w) in edges.iter().zip(tenths) {
        per_node[v] += u32::from(w);
    }
    if per_node.iter().any(|&s| s > 10) {
        return None;
    }
    let raw = edges
        .iter()
        .zip(tenths)
        .map(|(&(v, u), &w)| (v, u, f64::from(w) / 10.0))
        .collect();
    InfoNetwork::from_parts(node_labels(n), alloc::vec![NodeKind::Regular; n], raw).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn dags_are_acyclic_and_closed() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..9);
            let net = random_dag(&mut rng, n, 16);
            assert!(net.is_acyclic());
            assert!(net.edges().len() <= 16);
            for v in net.nodes() {
                let s: f64 = net.out_edges(v).map(|(_, w)| w).sum();
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cyclic_generator_produces_cycles() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let cyclic = (0..100)
            .map(|_| random_network(&mut rng, RandomNetworkParams::cyclic(5, 10)))
            .filter(|g| !g.is_acyclic())
            .count();
        assert!(cyclic > 50);
    }

    #[test]
    fn grid_weights_reject_overfull_nodes() {
        assert!(quantized_weights(3, &[(0, 1), (0, 2)], &[6, 5]).is_none());
        let g = quantized_weights(3, &[(0, 1), (0, 2)], &[6, 4]).unwrap();
        assert_eq!(g.out_edges(super::super::NodeId::new(0)).count(), 2);
    }
}
