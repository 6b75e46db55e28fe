use alloc::vec::Vec;

use rand::Rng;

use super::{activation, rng, ThresholdConfig, Trajectory};
use crate::error::{Error, Result};
use crate::network::{InfoNetwork, NodeId};

/// Influence paths `P_v^t` recorded by the path-effect process.
///
/// Stored as the parent picked by each `(t, v)`; `P_v^t` is `P_u^{t-1}`
/// followed by `u`, where `u` is that parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfluencePaths {
    horizon: usize,
    nodes: usize,
    parent: Vec<NodeId>,
    origin: Vec<NodeId>,
}

impl InfluencePaths {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `P_v^t[t]`; for `t = 0` this is `v` itself.
    pub fn parent(&self, t: usize, v: NodeId) -> NodeId {
        self.parent[t * self.nodes + v.index()]
    }

    /// `P_v^t[0]`, the node whose initial state `v` carries at time `t`.
    pub fn origin(&self, t: usize, v: NodeId) -> NodeId {
        self.origin[t * self.nodes + v.index()]
    }

    /// The full path `P_v^t[0..=t]`.
    pub fn path(&self, t: usize, v: NodeId) -> Vec<NodeId> {
        let mut rev = Vec::with_capacity(t + 1);
        let mut cur = v;
        for s in (1..=t).rev() {
            let u = self.parent(s, cur);
            rev.push(u);
            cur = u;
        }
        rev.push(cur);
        rev.reverse();
        rev
    }
}

/// Picks a neighbor of `v` among those whose activity equals `want_active`,
/// with probability proportional to the edge weight.
fn pick<R: Rng + ?Sized>(
    net: &InfoNetwork,
    v: usize,
    prev: &[bool],
    want_active: bool,
    rng: &mut R,
) -> Option<NodeId> {
    let (targets, weights) = net.adjacency(v);
    let total: f64 = targets
        .iter()
        .zip(weights)
        .filter(|(u, _)| prev[u.index()] == want_active)
        .map(|(_, w)| w)
        .sum();
    if total <= 0.0 {
        return None;
    }
    let r = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (u, w) in targets.iter().zip(weights) {
        if prev[u.index()] == want_active {
            acc += w;
            last = Some(*u);
            if r < acc {
                return last;
            }
        }
    }
    last
}

/// Runs the path-effect process for transient seed `transient`.
///
/// An active node picks an active parent with probability `b_vu / f_v`, an
/// inactive node an inactive parent with probability `b_vu / (1 - f_v)`.
/// The parent choice stream is `rng::stream(seed)`. Activity is read off the
/// path origins, so the returned trajectory coincides with [`super::run_nlt`]
/// for the same thresholds whatever the choices.
pub fn run_path_effect(
    net: &InfoNetwork,
    transient: &[NodeId],
    thresholds: &ThresholdConfig,
    horizon: usize,
    seed: u64,
) -> Result<(Trajectory, InfluencePaths)> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    thresholds.check(net)?;
    let n = net.node_count();
    let void = net.void();
    let mut in_seed = alloc::vec![false; n];
    for &v in transient {
        if v.index() >= n {
            return Err(Error::UnknownNode(alloc::format!("#{}", v.index())));
        }
        if v == void {
            return Err(Error::VoidInSeedSet);
        }
        in_seed[v.index()] = true;
    }

    let mut rng = rng::stream(seed);
    let cells = (horizon + 1) * n;
    let mut parent = Vec::with_capacity(cells);
    let mut origin = Vec::with_capacity(cells);
    let mut active = Vec::with_capacity(cells);
    for (v, &seeded) in in_seed.iter().enumerate() {
        parent.push(NodeId::new(v));
        origin.push(NodeId::new(v));
        active.push(seeded);
    }

    for t in 1..=horizon {
        let prev = (t - 1) * n;
        for v in 0..n {
            let u = if v == void.index() {
                void
            } else {
                let prev_active = &active[prev..prev + n];
                let f = activation(net, v, prev_active);
                let want_active = f >= thresholds.get(NodeId::new(v));
                // With floating-point slack an inactive node can find no
                // inactive neighbor; the void node then stands in for one.
                pick(net, v, prev_active, want_active, &mut rng).unwrap_or(void)
            };
            let o = origin[prev + u.index()];
            parent.push(u);
            origin.push(o);
            active.push(in_seed[o.index()]);
        }
    }

    Ok((
        Trajectory::from_rows(horizon, n, active),
        InfluencePaths {
            horizon,
            nodes: n,
            parent,
            origin,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{run_nlt, sample_thresholds, SeedSets};
    use crate::network::{random_network, RandomNetworkParams};
    use rand::SeedableRng;

    #[test]
    fn initial_paths_are_trivial() {
        let net = InfoNetwork::build(&["a", "b", "c"], &[("b", "a", 0.6), ("c", "b", 0.3)]).unwrap();
        let a = net.resolve("a").unwrap();
        let theta = sample_thresholds(&net, 3);
        let (traj, paths) = run_path_effect(&net, &[a], &theta, 3, 1).unwrap();
        for v in net.nodes() {
            assert_eq!(paths.path(0, v), [v]);
        }
        assert_eq!(traj.active_set(0), [a]);
        let void = net.void();
        for t in 0..=3 {
            assert_eq!(paths.path(t, void), alloc::vec![void; t + 1]);
        }
    }

    #[test]
    fn path_structure_invariant() {
        let mut r = rng::stream(17);
        for _ in 0..20 {
            let net = random_network(&mut r, RandomNetworkParams::cyclic(6, 12));
            let theta = ThresholdConfig::sample(&net, &mut r);
            let (_, paths) = run_path_effect(&net, &[NodeId::new(0)], &theta, 4, 5).unwrap();
            for t in 1..=4 {
                for v in net.nodes() {
                    let p = paths.path(t, v);
                    assert_eq!(p.len(), t + 1);
                    let u = p[t];
                    assert!(net.out_edges(v).any(|(x, _)| x == u));
                    assert_eq!(&p[..t], paths.path(t - 1, u).as_slice());
                    assert_eq!(p[0], paths.origin(t, v));
                }
            }
        }
    }

    #[test]
    fn matches_nlt_for_any_choice_stream() {
        let mut r = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(23);
        for i in 0..30 {
            let net = random_network(&mut r, RandomNetworkParams::cyclic(7, 14));
            let seeds: Vec<NodeId> = net
                .non_void_nodes()
                .filter(|_| r.random_bool(0.4))
                .collect();
            let s = SeedSets::new(&net, seeds.iter().copied(), []).unwrap();
            for k in 0..10 {
                let theta = ThresholdConfig::sample(&net, &mut r);
                let nlt = run_nlt(&net, &s, &theta, 5).unwrap();
                let (pe, _) = run_path_effect(&net, &seeds, &theta, 5, i * 100 + k).unwrap();
                assert_eq!(nlt, pe);
            }
        }
    }
}
