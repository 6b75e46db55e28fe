use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{InfoNetwork, NodeId};

/// Kahn's algorithm on the reversed graph: a node is emitted once all of its
/// non-void out-neighbors have been. Returns a witness cycle on failure.
pub(super) fn descendant_first_order(net: &InfoNetwork) -> Result<Vec<NodeId>, Vec<NodeId>> {
    let n = net.node_count();
    let void = net.void().index();
    let mut pending = alloc::vec![0usize; n];
    let mut preds: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (v, count) in pending.iter_mut().enumerate() {
        if v == void {
            continue;
        }
        let (targets, _) = net.adjacency(v);
        for u in targets {
            let u = u.index();
            if u != void {
                *count += 1;
                preds[u].push(v);
            }
        }
    }

    let mut order = Vec::with_capacity(n);
    order.push(NodeId::new(void));
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| v != void && pending[v] == 0).collect();
    while let Some(u) = queue.pop_front() {
        order.push(NodeId::new(u));
        for &v in &preds[u] {
            pending[v] -= 1;
            if pending[v] == 0 {
                queue.push_back(v);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    // Every remaining node keeps at least one remaining out-neighbor, so
    // following those edges from any of them must revisit a node.
    let start = (0..n).find(|&v| v != void && pending[v] > 0).unwrap();
    let mut position = alloc::vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut v = start;
    loop {
        if position[v] != usize::MAX {
            return Err(walk[position[v]..].to_vec());
        }
        position[v] = walk.len();
        walk.push(NodeId::new(v));
        let (targets, _) = net.adjacency(v);
        v = targets
            .iter()
            .map(|u| u.index())
            .find(|&u| u != void && pending[u] > 0)
            .unwrap();
    }
}
