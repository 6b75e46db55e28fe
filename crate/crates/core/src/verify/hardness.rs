use alloc::vec::Vec;

use crate::diffusion::SeedSets;
use crate::error::{Error, Result};
use crate::exact::expected_influence_dag;
use crate::network::{vertex_cover_reduction, InfoNetwork, NodeId, UndirectedGraph};
use crate::par;

use super::EXACT_TOLERANCE;

/// Largest graph handled by the brute-force comparison.
pub const MAX_HARDNESS_VERTICES: usize = 12;

#[derive(Debug, Clone)]
pub struct HardnessReport {
    pub vertices: usize,
    pub edges: usize,
    pub k: usize,
    /// A vertex cover of exactly `k` vertices, if one exists.
    pub cover: Option<Vec<usize>>,
    /// A permanent seed set of `k + 1` nodes reaching the target value.
    pub seeds: Option<Vec<NodeId>>,
    /// The value `n + 1`: every node of the reduction network active.
    pub target: f64,
    /// Largest `σ̄(∅, Â)` over permanent sets of size `k + 1`.
    pub best_value: f64,
    pub network: InfoNetwork,
    pub consistent: bool,
}

/// Calls `f` on `k`-subsets of `0..n` in lexicographic order until it returns true.
fn any_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    if k > n {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx)? {
            return Ok(true);
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return Ok(false);
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-forces both sides of the reduction: a vertex cover of size `k`
/// exists iff some permanent set of `k + 1` nodes makes every node of the
/// reduction network active at `T = 1`, i.e. `σ̄(∅, Â) = n + 1`.
pub fn hardness_report(graph: &UndirectedGraph, k: usize) -> Result<HardnessReport> {
    let n = graph.vertex_count();
    if n > MAX_HARDNESS_VERTICES {
        return Err(Error::SearchBudgetExceeded {
            required: n as u128,
            limit: MAX_HARDNESS_VERTICES as u128,
        });
    }
    let (net, _) = vertex_cover_reduction(graph, None)?;

    let mut cover = None;
    any_subset(n, k, |s| {
        let mut mask = alloc::vec![false; n];
        for &v in s {
            mask[v] = true;
        }
        if graph.is_vertex_cover(&mask) {
            cover = Some(s.to_vec());
            return Ok(true);
        }
        Ok(false)
    })?;

    let target = (n + 1) as f64;
    let mut best_value = f64::NEG_INFINITY;
    let mut seeds = None;
    any_subset(n + 1, k + 1, |s| {
        let chosen: Vec<NodeId> = s.iter().map(|&i| NodeId::new(i)).collect();
        let value = expected_influence_dag(&net, &SeedSets::new(&net, [], chosen.iter().copied())?, 1)?;
        best_value = best_value.max(value);
        if libm::fabs(value - target) <= EXACT_TOLERANCE {
            seeds = Some(chosen);
            return Ok(true);
        }
        Ok(false)
    })?;
    if best_value == f64::NEG_INFINITY {
        best_value = 0.0;
    }

    Ok(HardnessReport {
        vertices: n,
        edges: graph.edges().len(),
        k,
        consistent: cover.is_some() == seeds.is_some(),
        cover,
        seeds,
        target,
        best_value,
        network: net,
    })
}

/// Whether the two sides of the vertex-cover reduction agree for `k`.
pub fn verify_hardness_reduction(graph: &UndirectedGraph, k: usize) -> Result<bool> {
    Ok(hardness_report(graph, k)?.consistent)
}

/// Outcome of [`hardness_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct HardnessSweep {
    pub max_vertices: usize,
    pub graphs: u64,
    pub instances: u64,
    /// `(graph, k)` pairs on which the two sides disagree.
    pub failures: Vec<(UndirectedGraph, usize)>,
}

impl HardnessSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs [`verify_hardness_reduction`] on every labeled graph with 1 to
/// `max_vertices` vertices and every `k` from 0 to the vertex count.
pub fn hardness_sweep(max_vertices: usize) -> Result<HardnessSweep> {
    if max_vertices > 6 {
        return Err(Error::SearchBudgetExceeded {
            required: max_vertices as u128,
            limit: 6,
        });
    }
    let mut sweep = HardnessSweep {
        max_vertices,
        graphs: 0,
        instances: 0,
        failures: Vec::new(),
    };
    for n in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let count = 1usize << pairs.len();
        let results: Vec<Result<Vec<(UndirectedGraph, usize)>>> = par::map_indexed(count, |mask| {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let graph = UndirectedGraph::from_edges(n, &edges)?;
            let mut bad = Vec::new();
            for k in 0..=n {
                if !verify_hardness_reduction(&graph, k)? {
                    bad.push((graph.clone(), k));
                }
            }
            Ok(bad)
        });
        for r in results {
            sweep.failures.extend(r?);
        }
        sweep.graphs += count as u64;
        sweep.instances += (count * (n + 1)) as u64;
    }
    Ok(sweep)
}
