use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{InfoNetwork, NodeId, NodeKind, DUMMY_PREFIX};
use crate::error::{Error, Result};

/// A network in which every permanent seed `y` has been rewired into a chain
/// of `horizon` dummy nodes, so that seeding `A ∪ Â ∪ D` transiently
/// reproduces the permanent behavior of `Â` up to the horizon.
#[derive(Debug, Clone)]
pub struct TransformedNetwork {
    pub network: InfoNetwork,
    pub horizon: usize,
    /// `(y, D_y)` for each permanent node, chain listed head first.
    pub chains: Vec<(NodeId, Vec<NodeId>)>,
}

impl TransformedNetwork {
    /// Maps a base node to its id in the transformed network.
    ///
    /// Base nodes keep their index; only the void node moves past the dummies.
    pub fn map(&self, base: &InfoNetwork, v: NodeId) -> NodeId {
        if base.is_void(v) {
            self.network.void()
        } else {
            v
        }
    }

    /// All dummy nodes, chain by chain.
    pub fn dummies(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.chains.iter().flat_map(|(_, c)| c.iter().copied())
    }

    /// The transient seed `A ∪ Â ∪ D` for the transformed instance.
    pub fn transient_seed(&self, transient: &[NodeId]) -> Vec<NodeId> {
        let mut seed: Vec<NodeId> = transient.to_vec();
        for (y, chain) in &self.chains {
            seed.push(*y);
            seed.extend_from_slice(chain);
        }
        seed.sort_unstable();
        seed.dedup();
        seed
    }
}

pub fn transform_permanent(
    net: &InfoNetwork,
    permanent: &[NodeId],
    horizon: usize,
) -> Result<TransformedNetwork> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let mut perm: Vec<NodeId> = permanent.to_vec();
    perm.sort_unstable();
    perm.dedup();
    if perm.iter().any(|&y| net.is_void(y)) {
        return Err(Error::VoidInPermanentSet);
    }
    if let Some(&y) = perm.iter().find(|y| y.index() >= net.node_count()) {
        return Err(Error::UnknownNode(format!("#{}", y.index())));
    }

    let mut labels = net.labels_without_void();
    let mut kinds = net.kinds_without_void();
    let mut is_perm = alloc::vec![false; net.node_count()];
    for &y in &perm {
        is_perm[y.index()] = true;
    }
    let mut raw: Vec<(usize, usize, f64)> = net
        .raw_indices()
        .into_iter()
        .filter(|&(s, _, _)| !is_perm[s])
        .collect();

    let mut chains = Vec::with_capacity(perm.len());
    for &y in &perm {
        let mut chain = Vec::with_capacity(horizon);
        for i in 1..=horizon {
            let id = labels.len();
            labels.push(format!("{DUMMY_PREFIX}{}:{i}", net.label(y)));
            kinds.push(NodeKind::Dummy);
            chain.push(NodeId::new(id));
        }
        raw.push((y.index(), chain[0].index(), 1.0));
        for pair in chain.windows(2) {
            raw.push((pair[0].index(), pair[1].index(), 1.0));
        }
        chains.push((y, chain));
    }

    let network = InfoNetwork::from_parts(labels, kinds, raw)?;
    Ok(TransformedNetwork {
        network,
        horizon,
        chains,
    })
}

/// Adds `count` fresh leaves, each with a single weight-1 edge into `target`.
///
/// Every leaf is active at time `t` exactly when `target` was active at
/// `t - 1`, so the leaves scale the target's contribution to the objective.
pub fn amplify(net: &InfoNetwork, target: NodeId, count: usize) -> Result<InfoNetwork> {
    if net.is_void(target) {
        return Err(Error::VoidTarget);
    }
    if target.index() >= net.node_count() {
        return Err(Error::UnknownNode(format!("#{}", target.index())));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("amplification needs at least one leaf".into()));
    }
    let mut labels = net.labels_without_void();
    let mut kinds = net.kinds_without_void();
    let mut raw = net.raw_indices();
    let mut fresh: Vec<String> = Vec::with_capacity(count);
    for i in 1..=count {
        let label = net.fresh_label(&format!("{}#leaf{i}", net.label(target)), &fresh);
        fresh.push(label.clone());
        raw.push((labels.len(), target.index(), 1.0));
        labels.push(label);
        kinds.push(NodeKind::Regular);
    }
    InfoNetwork::from_parts(labels, kinds, raw)
}
