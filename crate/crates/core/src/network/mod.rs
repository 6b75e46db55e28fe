//! Information networks: directed graphs whose out-weights sum to one once the
//! void node absorbs the slack.
//!
//! Nodes are addressed by dense [`NodeId`]s. The void node is always the last
//! index and carries a single weight-1 self-loop. Acyclicity ignores that
//! self-loop.

mod random;
mod reduction;
mod topo;
mod transform;

pub use random::{random_dag, random_network, quantized_weights, RandomNetworkParams};
pub use reduction::{vertex_cover_reduction, UndirectedGraph};
pub use transform::{amplify, transform_permanent, TransformedNetwork};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Slack below this is dropped instead of becoming a void edge.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Label reserved for the void node.
pub const VOID_LABEL: &str = "__void";

/// Prefix reserved for dummy chain nodes.
pub const DUMMY_PREFIX: &str = "__dummy:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub const fn new(index: usize) -> Self {
        NodeId(index as u32)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// An ordinary node counted by the influence objective.
    Regular,
    /// A node of a dummy chain added for a permanent seed; never counted.
    Dummy,
    Void,
}

/// A pre-normalization edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
}

/// An immutable, normalized information network.
#[derive(Debug, Clone)]
pub struct InfoNetwork {
    labels: Vec<String>,
    kinds: Vec<NodeKind>,
    raw: Vec<Edge>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    topo: Vec<NodeId>,
    cycle: Vec<NodeId>,
}

impl InfoNetwork {
    /// Builds a network from user labels and `(src, dst, weight)` triples.
    ///
    /// Weights must lie in `(0, 1]` and sum to at most one per source node.
    /// Labels may not use the reserved void or dummy names.
    pub fn build<L, E>(nodes: &[L], edges: &[(E, E, f64)]) -> Result<Self>
    where
        L: AsRef<str>,
        E: AsRef<str>,
    {
        let mut index = BTreeMap::new();
        let mut labels = Vec::with_capacity(nodes.len());
        for l in nodes {
            let l = l.as_ref();
            if l == VOID_LABEL || l.starts_with(DUMMY_PREFIX) {
                return Err(Error::ReservedLabel(l.to_string()));
            }
            if index.insert(l.to_string(), labels.len()).is_some() {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            labels.push(l.to_string());
        }
        let mut raw = Vec::with_capacity(edges.len());
        for (s, d, w) in edges {
            let lookup = |l: &str| {
                index
                    .get(l)
                    .copied()
                    .ok_or_else(|| Error::UnknownEndpoint(l.to_string()))
            };
            raw.push((lookup(s.as_ref())?, lookup(d.as_ref())?, *w));
        }
        let kinds = alloc::vec![NodeKind::Regular; labels.len()];
        Self::from_parts(labels, kinds, raw)
    }

    /// Builds from dense indices; `labels` and `kinds` exclude the void node,
    /// which is appended.
    pub(crate) fn from_parts(
        mut labels: Vec<String>,
        mut kinds: Vec<NodeKind>,
        raw: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let n = labels.len();
        debug_assert_eq!(kinds.len(), n);
        let void = NodeId::new(n);
        labels.push(VOID_LABEL.to_string());
        kinds.push(NodeKind::Void);

        let mut out: Vec<Vec<(NodeId, f64)>> = alloc::vec![Vec::new(); n];
        let mut seen = BTreeMap::new();
        let mut edges = Vec::with_capacity(raw.len());
        for &(s, d, w) in &raw {
            if s >= n || d >= n {
                return Err(Error::UnknownEndpoint(format!("#{}", s.max(d))));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::WeightOutOfRange {
                    src: labels[s].clone(),
                    dst: labels[d].clone(),
                    weight: w,
                });
            }
            if seen.insert((s, d), ()).is_some() {
                return Err(Error::DuplicateEdge {
                    src: labels[s].clone(),
                    dst: labels[d].clone(),
                });
            }
            out[s].push((NodeId::new(d), w));
            edges.push(Edge {
                src: NodeId::new(s),
                dst: NodeId::new(d),
                weight: w,
            });
        }

        let mut offsets = Vec::with_capacity(n + 2);
        let mut targets = Vec::with_capacity(raw.len() + n + 1);
        let mut weights = Vec::with_capacity(raw.len() + n + 1);
        offsets.push(0);
        for (v, list) in out.iter().enumerate() {
            let sum: f64 = list.iter().map(|&(_, w)| w).sum();
            if sum > 1.0 + WEIGHT_TOLERANCE {
                return Err(Error::WeightSumExceedsOne {
                    node: labels[v].clone(),
                    sum,
                });
            }
            for &(u, w) in list {
                targets.push(u);
                weights.push(w);
            }
            let slack = 1.0 - sum;
            if slack > WEIGHT_TOLERANCE {
                targets.push(void);
                weights.push(slack);
            }
            offsets.push(targets.len());
        }
        targets.push(void);
        weights.push(1.0);
        offsets.push(targets.len());

        let mut net = InfoNetwork {
            labels,
            kinds,
            raw: edges,
            offsets,
            targets,
            weights,
            topo: Vec::new(),
            cycle: Vec::new(),
        };
        match topo::descendant_first_order(&net) {
            Ok(order) => net.topo = order,
            Err(cycle) => net.cycle = cycle,
        }
        Ok(net)
    }

    /// Total node count including the void node.
    #[inline]
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn void(&self) -> NodeId {
        NodeId::new(self.labels.len() - 1)
    }

    #[inline]
    pub fn is_void(&self, v: NodeId) -> bool {
        v.index() + 1 == self.labels.len()
    }

    pub fn kind(&self, v: NodeId) -> NodeKind {
        self.kinds[v.index()]
    }

    /// True for nodes that contribute to influence totals.
    #[inline]
    pub fn is_counted(&self, v: NodeId) -> bool {
        self.kinds[v.index()] == NodeKind::Regular
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label).map(NodeId::new)
    }

    /// Resolves a label or reports it as unknown.
    pub fn resolve(&self, label: &str) -> Result<NodeId> {
        self.find(label)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    /// All node ids, void last.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId::new)
    }

    /// Non-void node ids (including dummy chain nodes).
    pub fn non_void_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len() - 1).map(NodeId::new)
    }

    /// Nodes counted by the influence objective.
    pub fn counted_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| self.is_counted(v))
    }

    pub fn counted_count(&self) -> usize {
        self.kinds.iter().filter(|&&k| k == NodeKind::Regular).count()
    }

    /// Normalized outgoing neighbors `Γ(v)` with their weights, void edge last.
    #[inline]
    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let (a, b) = (self.offsets[v.index()], self.offsets[v.index() + 1]);
        self.targets[a..b]
            .iter()
            .copied()
            .zip(self.weights[a..b].iter().copied())
    }

    /// Normalized adjacency slices for `v`.
    #[inline]
    pub(crate) fn adjacency(&self, v: usize) -> (&[NodeId], &[f64]) {
        let (a, b) = (self.offsets[v], self.offsets[v + 1]);
        (&self.targets[a..b], &self.weights[a..b])
    }

    /// Weight `b_vu` after normalization, zero when there is no edge.
    pub fn weight(&self, v: NodeId, u: NodeId) -> f64 {
        self.out_edges(v)
            .find(|&(t, _)| t == u)
            .map_or(0.0, |(_, w)| w)
    }

    /// Edges as supplied, before normalization. Never mentions the void node.
    pub fn edges(&self) -> &[Edge] {
        &self.raw
    }

    /// Labels of all non-void nodes in index order.
    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.labels[..self.labels.len() - 1].iter().map(String::as_str)
    }

    pub fn is_acyclic(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Evaluation order placing every non-void out-neighbor before its source,
    /// void first.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        if self.is_acyclic() {
            Ok(self.topo.clone())
        } else {
            Err(self.cyclic_error())
        }
    }

    /// A witness cycle, empty for acyclic networks.
    pub fn cycle(&self) -> &[NodeId] {
        &self.cycle
    }

    pub fn cyclic_error(&self) -> Error {
        Error::CyclicNetwork {
            cycle: self.cycle.iter().map(|&v| self.label(v).to_string()).collect(),
        }
    }

    pub(crate) fn kinds_without_void(&self) -> Vec<NodeKind> {
        self.kinds[..self.kinds.len() - 1].to_vec()
    }

    pub(crate) fn labels_without_void(&self) -> Vec<String> {
        self.labels[..self.labels.len() - 1].to_vec()
    }

    pub(crate) fn raw_indices(&self) -> Vec<(usize, usize, f64)> {
        self.raw
            .iter()
            .map(|e| (e.src.index(), e.dst.index(), e.weight))
            .collect()
    }

    /// Returns a label not yet used, starting from `base`.
    pub(crate) fn fresh_label(&self, base: &str, taken: &[String]) -> String {
        let mut candidate = base.to_string();
        while self.find(&candidate).is_some() || taken.contains(&candidate) {
            candidate.push('\'');
        }
        candidate
    }
}
