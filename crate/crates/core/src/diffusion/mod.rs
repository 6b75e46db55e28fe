//! The non-progressive linear threshold process.
//!
//! Given thresholds `θ`, a node outside the permanent set is active at time
//! `t` iff the weight of its out-neighbors active at `t - 1` is at least
//! `θ_v`. Permanent seeds are active at every step; the void node never is.

mod monte_carlo;
mod path_effect;
pub mod rng;

pub use monte_carlo::{monte_carlo_indicators, monte_carlo_influence, IndicatorEstimate, MonteCarloEstimate};
pub use path_effect::{run_path_effect, InfluencePaths};

use alloc::vec::Vec;

use rand::distr::{Distribution, Open01};
use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{InfoNetwork, NodeId};

/// Transient and permanent seeds, kept sorted and disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedSets {
    transient: Vec<NodeId>,
    permanent: Vec<NodeId>,
}

impl SeedSets {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Nodes listed in both sets are kept as permanent only.
    pub fn new<I, J>(net: &InfoNetwork, transient: I, permanent: J) -> Result<Self>
    where
        I: IntoIterator<Item = NodeId>,
        J: IntoIterator<Item = NodeId>,
    {
        let check = |v: NodeId| {
            if v.index() >= net.node_count() {
                Err(Error::UnknownNode(alloc::format!("#{}", v.index())))
            } else if net.is_void(v) {
                Err(Error::VoidInSeedSet)
            } else {
                Ok(v)
            }
        };
        let mut permanent = permanent.into_iter().map(check).collect::<Result<Vec<_>>>()?;
        permanent.sort_unstable();
        permanent.dedup();
        let mut transient = transient
            .into_iter()
            .map(check)
            .collect::<Result<Vec<_>>>()?;
        transient.sort_unstable();
        transient.dedup();
        transient.retain(|v| permanent.binary_search(v).is_err());
        Ok(SeedSets {
            transient,
            permanent,
        })
    }

    pub fn from_labels<S: AsRef<str>>(
        net: &InfoNetwork,
        transient: &[S],
        permanent: &[S],
    ) -> Result<Self> {
        let resolve = |ls: &[S]| {
            ls.iter()
                .map(|l| net.resolve(l.as_ref()))
                .collect::<Result<Vec<_>>>()
        };
        Self::new(net, resolve(transient)?, resolve(permanent)?)
    }

    pub fn transient(&self) -> &[NodeId] {
        &self.transient
    }

    pub fn permanent(&self) -> &[NodeId] {
        &self.permanent
    }

    pub fn is_empty(&self) -> bool {
        self.transient.is_empty() && self.permanent.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.transient.binary_search(&v).is_ok() || self.permanent.binary_search(&v).is_ok()
    }

    /// Adds `v` as transient. No-op if `v` is already seeded in either role.
    pub fn with_transient(&self, v: NodeId) -> Self {
        let mut s = self.clone();
        if !s.contains(v) {
            let at = s.transient.binary_search(&v).unwrap_err();
            s.transient.insert(at, v);
        }
        s
    }

    /// Adds `v` as permanent, dropping it from the transient set if present.
    pub fn with_permanent(&self, v: NodeId) -> Self {
        let mut s = self.clone();
        s.transient.retain(|&x| x != v);
        if let Err(at) = s.permanent.binary_search(&v) {
            s.permanent.insert(at, v);
        }
        s
    }

    /// Membership masks `(transient, permanent)` over `n` nodes.
    pub fn masks(&self, n: usize) -> (Vec<bool>, Vec<bool>) {
        let mut a = alloc::vec![false; n];
        let mut p = alloc::vec![false; n];
        for v in &self.transient {
            a[v.index()] = true;
        }
        for v in &self.permanent {
            p[v.index()] = true;
        }
        (a, p)
    }
}

/// One threshold in `(0, 1)` per non-void node, indexed by node.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig(Vec<f64>);

impl ThresholdConfig {
    /// Wraps explicit thresholds, one per non-void node.
    pub fn from_values(net: &InfoNetwork, values: Vec<f64>) -> Result<Self> {
        let expected = net.node_count() - 1;
        if values.len() != expected {
            return Err(Error::MissingThreshold {
                expected,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidArgument(alloc::format!(
                "threshold {bad} outside (0, 1)"
            )));
        }
        Ok(ThresholdConfig(values))
    }

    /// Independent `Uniform(0, 1)` draws (open interval) in node order.
    pub fn sample<R: Rng + ?Sized>(net: &InfoNetwork, rng: &mut R) -> Self {
        ThresholdConfig(
            (0..net.node_count() - 1)
                .map(|_| Open01.sample(rng))
                .collect(),
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn get(&self, v: NodeId) -> f64 {
        self.0[v.index()]
    }

    fn check(&self, net: &InfoNetwork) -> Result<()> {
        if self.0.len() + 1 == net.node_count() {
            Ok(())
        } else {
            Err(Error::MissingThreshold {
                expected: net.node_count() - 1,
                found: self.0.len(),
            })
        }
    }
}

/// Deterministic threshold draw from the [`rng::Prng`] stream seeded with `seed`.
pub fn sample_thresholds(net: &InfoNetwork, seed: u64) -> ThresholdConfig {
    ThresholdConfig::sample(net, &mut rng::stream(seed))
}

/// Active sets `A_0..A_T` of one run, as a dense `(T + 1) × n` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    horizon: usize,
    nodes: usize,
    active: Vec<bool>,
}

impl Trajectory {
    pub(crate) fn from_rows(horizon: usize, nodes: usize, active: Vec<bool>) -> Self {
        debug_assert_eq!(active.len(), (horizon + 1) * nodes);
        Trajectory {
            horizon,
            nodes,
            active,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn row(&self, t: usize) -> &[bool] {
        &self.active[t * self.nodes..(t + 1) * self.nodes]
    }

    #[inline]
    pub fn is_active(&self, t: usize, v: NodeId) -> bool {
        self.active[t * self.nodes + v.index()]
    }

    pub fn active_set(&self, t: usize) -> Vec<NodeId> {
        self.row(t)
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| NodeId::new(i))
            .collect()
    }

    /// Number of active counted nodes at time `t`.
    pub fn active_count(&self, net: &InfoNetwork, t: usize) -> usize {
        self.row(t)
            .iter()
            .enumerate()
            .filter(|&(v, &a)| a && net.is_counted(NodeId::new(v)))
            .count()
    }

    /// `Σ_{t=1..T} |A_t|` over counted nodes.
    pub fn total_active(&self, net: &InfoNetwork) -> usize {
        (1..=self.horizon).map(|t| self.active_count(net, t)).sum()
    }

    /// Average number of active counted nodes over `t = 1..T`; row 0 is excluded.
    pub fn influence(&self, net: &InfoNetwork) -> f64 {
        self.total_active(net) as f64 / self.horizon as f64
    }
}

/// Weight of the active out-neighbors of `v`.
#[inline]
pub(crate) fn activation(net: &InfoNetwork, v: usize, prev: &[bool]) -> f64 {
    let (targets, weights) = net.adjacency(v);
    let mut f = 0.0;
    for (u, w) in targets.iter().zip(weights) {
        if prev[u.index()] {
            f += w;
        }
    }
    f
}

/// One synchronous update. `prev` and the result are activity masks over all
/// nodes; `permanent` marks the permanent seeds.
pub fn step_nlt(
    net: &InfoNetwork,
    permanent: &[bool],
    prev: &[bool],
    thresholds: &ThresholdConfig,
) -> Result<Vec<bool>> {
    thresholds.check(net)?;
    let mut next = alloc::vec![false; net.node_count()];
    step_into(net, permanent, prev, thresholds, &mut next);
    Ok(next)
}

#[inline]
pub(crate) fn step_into(
    net: &InfoNetwork,
    permanent: &[bool],
    prev: &[bool],
    thresholds: &ThresholdConfig,
    next: &mut [bool],
) {
    let void = net.void().index();
    for v in 0..void {
        next[v] = permanent[v] || activation(net, v, prev) >= thresholds.0[v];
    }
    next[void] = false;
}

/// Runs the process for `horizon` steps.
pub fn run_nlt(
    net: &InfoNetwork,
    seeds: &SeedSets,
    thresholds: &ThresholdConfig,
    horizon: usize,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    thresholds.check(net)?;
    let n = net.node_count();
    let (transient, permanent) = seeds.masks(n);
    let mut active = alloc::vec![false; (horizon + 1) * n];
    for v in 0..n {
        active[v] = transient[v] || permanent[v];
    }
    for t in 1..=horizon {
        let (done, rest) = active.split_at_mut(t * n);
        step_into(net, &permanent, &done[(t - 1) * n..], thresholds, &mut rest[..n]);
    }
    Ok(Trajectory::from_rows(horizon, n, active))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> InfoNetwork {
        InfoNetwork::build(&["a", "b"], &[("b", "a", 1.0)]).unwrap()
    }

    fn diamond() -> InfoNetwork {
        InfoNetwork::build(&["v", "u1", "u2"], &[("v", "u1", 0.5), ("v", "u2", 0.5)]).unwrap()
    }

    #[test]
    fn empty_prev_stays_empty() {
        let net = diamond();
        let theta = sample_thresholds(&net, 1);
        let n = net.node_count();
        let next = step_nlt(&net, &alloc::vec![false; n], &alloc::vec![false; n], &theta).unwrap();
        assert!(next.iter().all(|&a| !a));
    }

    #[test]
    fn full_weight_neighbor_always_activates() {
        let net = chain();
        let mut prev = alloc::vec![false; net.node_count()];
        prev[0] = true;
        for x in [1e-9, 0.5, 1.0 - 1e-9] {
            let theta = ThresholdConfig::from_values(&net, alloc::vec![0.5, x]).unwrap();
            let next = step_nlt(&net, &alloc::vec![false; 3], &prev, &theta).unwrap();
            assert_eq!(next, [false, true, false]);
        }
    }

    #[test]
    fn comparison_against_threshold() {
        let net = diamond();
        let mut prev = alloc::vec![false; net.node_count()];
        prev[1] = true;
        let none = alloc::vec![false; net.node_count()];
        let hi = ThresholdConfig::from_values(&net, alloc::vec![0.6, 0.5, 0.5]).unwrap();
        let lo = ThresholdConfig::from_values(&net, alloc::vec![0.4, 0.5, 0.5]).unwrap();
        assert!(!step_nlt(&net, &none, &prev, &hi).unwrap()[0]);
        assert!(step_nlt(&net, &none, &prev, &lo).unwrap()[0]);
        // Ties activate.
        let tie = ThresholdConfig::from_values(&net, alloc::vec![0.5, 0.5, 0.5]).unwrap();
        assert!(step_nlt(&net, &none, &prev, &tie).unwrap()[0]);
    }

    #[test]
    fn threshold_length_is_checked() {
        let net = diamond();
        let theta = ThresholdConfig(alloc::vec![0.5]);
        let n = net.node_count();
        assert!(matches!(
            step_nlt(&net, &alloc::vec![false; n], &alloc::vec![false; n], &theta),
            Err(Error::MissingThreshold { expected: 3, found: 1 })
        ));
        assert!(ThresholdConfig::from_values(&net, alloc::vec![0.5, 0.0, 0.2]).is_err());
    }

    #[test]
    fn chain_transient_run() {
        let net = chain();
        let seeds = SeedSets::from_labels(&net, &["a"], &[]).unwrap();
        let traj = run_nlt(&net, &seeds, &sample_thresholds(&net, 5), 2).unwrap();
        assert_eq!(traj.row(0), [true, false, false]);
        assert_eq!(traj.row(1), [false, true, false]);
        assert_eq!(traj.row(2), [false, false, false]);
        assert_eq!(traj.influence(&net), 0.5);
    }

    #[test]
    fn chain_permanent_run() {
        let net = chain();
        let seeds = SeedSets::from_labels(&net, &[], &["a"]).unwrap();
        let traj = run_nlt(&net, &seeds, &sample_thresholds(&net, 5), 4).unwrap();
        for t in 1..=4 {
            assert_eq!(traj.row(t), [true, true, false]);
        }
        assert_eq!(traj.influence(&net), 2.0);
    }

    #[test]
    fn empty_seeds_give_zero() {
        let net = diamond();
        let traj = run_nlt(&net, &SeedSets::empty(), &sample_thresholds(&net, 0), 3).unwrap();
        assert_eq!(traj.influence(&net), 0.0);
        assert!(run_nlt(&net, &SeedSets::empty(), &sample_thresholds(&net, 0), 0).is_err());
    }

    #[test]
    fn all_permanent_is_everything() {
        let net = diamond();
        let all: Vec<NodeId> = net.counted_nodes().collect();
        let seeds = SeedSets::new(&net, [], all).unwrap();
        let traj = run_nlt(&net, &seeds, &sample_thresholds(&net, 2), 7).unwrap();
        assert_eq!(traj.influence(&net), 3.0);
    }

    #[test]
    fn seed_sets_are_disjoint_and_exclude_void() {
        let net = diamond();
        let v = net.resolve("v").unwrap();
        let s = SeedSets::new(&net, [v], [v]).unwrap();
        assert!(s.transient().is_empty());
        assert_eq!(s.permanent(), [v]);
        assert_eq!(SeedSets::new(&net, [net.void()], []), Err(Error::VoidInSeedSet));
        assert_eq!(s.with_transient(v), s);
        let u = net.resolve("u1").unwrap();
        assert_eq!(s.with_transient(u).with_permanent(u).transient(), []);
    }

    #[test]
    fn sampling_is_deterministic() {
        let net = diamond();
        assert_eq!(sample_thresholds(&net, 42), sample_thresholds(&net, 42));
        assert_ne!(sample_thresholds(&net, 42), sample_thresholds(&net, 43));
    }
}
