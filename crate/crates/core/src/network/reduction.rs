use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{InfoNetwork, NodeId, NodeKind};
use crate::error::{Error, Result};

/// A simple undirected graph over labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    /// Rejects self-loops, repeated edges and unknown endpoints.
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::UnknownEndpoint(alloc::format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::InvalidArgument(alloc::format!(
                    "self-loop on `{}`",
                    labels[a]
                )));
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(Error::DuplicateEdge {
                    src: labels[e.0].clone(),
                    dst: labels[e.1].clone(),
                });
            }
            normalized.push(e);
        }
        Ok(UndirectedGraph {
            labels,
            edges: normalized,
        })
    }

    /// Vertices labelled `0..n` with the given edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges.to_vec())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Edges with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_vertex_cover(&self, cover: &[bool]) -> bool {
        self.edges.iter().all(|&(a, b)| cover[a] || cover[b])
    }
}

/// Builds the hardness-reduction network from `graph`.
///
/// Each undirected edge is directed from the vertex later in `ordering` to
/// the earlier one, so the later vertex is influenced by the earlier. Vertices
/// left without out-edges point to an added dummy vertex. Out-weights are
/// uniform. The dummy vertex is an ordinary, counted node.
pub fn vertex_cover_reduction(
    graph: &UndirectedGraph,
    ordering: Option<&[usize]>,
) -> Result<(InfoNetwork, NodeId)> {
    let n = graph.vertex_count();
    let mut rank: Vec<usize> = (0..n).collect();
    if let Some(order) = ordering {
        let mut seen = alloc::vec![false; n];
        if order.len() != n || order.iter().any(|&v| v >= n || core::mem::replace(&mut seen[v], true)) {
            return Err(Error::InvalidArgument("ordering must be a permutation of the vertices".into()));
        }
        for (pos, &v) in order.iter().enumerate() {
            rank[v] = pos;
        }
    }

    let mut out: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for &(a, b) in graph.edges() {
        let (early, late) = if rank[a] < rank[b] { (a, b) } else { (b, a) };
        out[late].push(early);
    }

    let mut labels = graph.labels().to_vec();
    let dummy_label = {
        let mut l = String::from("dummy");
        while labels.contains(&l) {
            l.push('\'');
        }
        l
    };
    let dummy = n;
    labels.push(dummy_label);
    let mut raw = Vec::new();
    for (v, targets) in out.iter_mut().enumerate() {
        if targets.is_empty() {
            targets.push(dummy);
        }
        targets.sort_unstable();
        let w = 1.0 / targets.len() as f64;
        raw.extend(targets.iter().map(|&u| (v, u, w)));
    }
    let kinds = alloc::vec![NodeKind::Regular; n + 1];
    let net = InfoNetwork::from_parts(labels, kinds, raw)?;
    Ok((net, NodeId::new(dummy)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_points_later_to_earlier() {
        let g = UndirectedGraph::from_edges(2, &[(0, 1)]).unwrap();
        let (net, dummy) = vertex_cover_reduction(&g, None).unwrap();
        let (u, v) = (net.resolve("0").unwrap(), net.resolve("1").unwrap());
        assert_eq!(net.weight(v, u), 1.0);
        assert_eq!(net.weight(u, dummy), 1.0);
        assert_eq!(net.weight(u, v), 0.0);
        assert!(net.is_acyclic());
        // The reversed ordering flips the edge.
        let (rev, _) = vertex_cover_reduction(&g, Some(&[1, 0])).unwrap();
        assert_eq!(rev.weight(u, v), 1.0);
    }

    #[test]
    fn empty_graph_wires_everything_to_dummy() {
        let g = UndirectedGraph::from_edges(2, &[]).unwrap();
        let (net, dummy) = vertex_cover_reduction(&g, None).unwrap();
        for l in ["0", "1"] {
            let v = net.resolve(l).unwrap();
            assert_eq!(net.out_edges(v).collect::<Vec<_>>(), [(dummy, 1.0)]);
        }
        assert_eq!(net.out_edges(dummy).collect::<Vec<_>>(), [(net.void(), 1.0)]);
        assert_eq!(net.counted_count(), 3);
    }

    #[test]
    fn triangle_weights_are_uniform() {
        let g = UndirectedGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let (net, _) = vertex_cover_reduction(&g, None).unwrap();
        let c = net.resolve("2").unwrap();
        assert_eq!(net.weight(c, net.resolve("0").unwrap()), 0.5);
        assert_eq!(net.weight(c, net.resolve("1").unwrap()), 0.5);
        assert!(net.is_acyclic());
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(UndirectedGraph::from_edges(2, &[(0, 0)]).is_err());
        assert!(UndirectedGraph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
        assert!(UndirectedGraph::from_edges(2, &[(0, 2)]).is_err());
        assert!(UndirectedGraph::from_edges(0, &[]).is_err());
        let g = UndirectedGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(vertex_cover_reduction(&g, Some(&[0, 0])).is_err());
    }

    #[test]
    fn dummy_label_avoids_collision() {
        let g = UndirectedGraph::new(alloc::vec!["dummy".into(), "x".into()], alloc::vec![]).unwrap();
        let (net, dummy) = vertex_cover_reduction(&g, None).unwrap();
        assert_eq!(net.label(dummy), "dummy'");
    }
}
