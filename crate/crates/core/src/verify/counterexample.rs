use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diffusion::{rng, SeedSets};
use crate::error::{Error, Result};
use crate::exact::{exact_indicators_cells, ReachTable};
use crate::network::{amplify, quantized_weights, InfoNetwork, NodeId};
use crate::par;

/// Smallest second difference accepted as a witness.
pub const MIN_VIOLATION: f64 = 1e-6;

/// Networks examined in parallel per batch.
const BATCH: u64 = 64;

/// Out-degree cap for searched networks, which bounds the cell count.
const MAX_OUT_DEGREE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Cycles of length at least two, no self-loops.
    GeneralCycles,
    /// Exactly one self-loop on a non-void node, otherwise acyclic.
    SelfLoopOnly,
    /// No cycles at all; the search is expected to come back empty.
    Acyclic,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::GeneralCycles => "general-cycles",
            Family::SelfLoopOnly => "self-loop-only",
            Family::Acyclic => "acyclic",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "general-cycles" => Some(Family::GeneralCycles),
            "self-loop-only" => Some(Family::SelfLoopOnly),
            "acyclic" => Some(Family::Acyclic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub family: Family,
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Inclusive range of averaging horizons tried, smallest first.
    pub horizons: (usize, usize),
    pub seed: u64,
    /// Random networks drawn per node count.
    pub attempts: u64,
    /// Cell budget per exact evaluation; networks exceeding it are skipped.
    pub cell_budget: u64,
}

impl SearchParams {
    pub fn new(family: Family) -> Self {
        SearchParams {
            family,
            min_nodes: 2,
            max_nodes: 6,
            horizons: (2, 8),
            seed: 0,
            attempts: 20_000,
            cell_budget: 200_000,
        }
    }
}

/// Per-time gains `E[X_{v*}^t(S ∪ {w})] - E[X_{v*}^t(S)]` and the same for `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorGap {
    pub time: usize,
    pub gain_small: f64,
    pub gain_large: f64,
}

/// A certified failure of submodularity.
///
/// `base` is the searched network, on which the single-node average
/// `A ↦ (1/T) Σ_{t=1..T} E[X_{target}^t(A)]` breaks submodularity for
/// `small ⊂ large` and `element`. `network` is `base` with `leaves` extra
/// nodes pointing at the target; on it, `σ̄` over `amplified_horizon`
/// itself is not submodular, by `violation`.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub family: Family,
    pub base: InfoNetwork,
    pub network: InfoNetwork,
    pub target: NodeId,
    pub horizon: usize,
    pub amplified_horizon: usize,
    pub leaves: usize,
    pub small: Vec<NodeId>,
    pub large: Vec<NodeId>,
    pub element: NodeId,
    pub gaps: Vec<IndicatorGap>,
    /// Second difference of the single-node average on `base`.
    pub indicator_violation: f64,
    /// Second difference of `σ̄` on `base` over `amplified_horizon`.
    pub base_violation: f64,
    /// Second difference of `σ̄` on `network`, measured by the cell oracle.
    pub violation: f64,
    pub oracle: &'static str,
    /// Networks examined before this one was found, itself included.
    pub networks_examined: u64,
}

/// `[σ̄(L ∪ {w}) - σ̄(L)] - [σ̄(S ∪ {w}) - σ̄(S)]` with transient seeds, by the
/// cell oracle. Positive values witness non-submodularity.
pub fn witness_violation(
    net: &InfoNetwork,
    horizon: usize,
    small: &[NodeId],
    large: &[NodeId],
    element: NodeId,
    cell_budget: u64,
) -> Result<f64> {
    if !small.iter().all(|v| large.contains(v)) || large.contains(&element) {
        return Err(Error::InvalidArgument("witness needs small ⊆ large and element ∉ large".into()));
    }
    let value = |set: &[NodeId], extra: Option<NodeId>| -> Result<f64> {
        let mut s = set.to_vec();
        s.extend(extra);
        let seeds = SeedSets::new(net, s, [])?;
        Ok(exact_indicators_cells(net, &seeds, horizon, cell_budget)?
            .table
            .influence(net))
    };
    Ok((value(large, Some(element))? - value(large, None)?)
        - (value(small, Some(element))? - value(small, None)?))
}

/// Random positive composition of `total` tenths into `parts` pieces.
fn composition<R: Rng + ?Sized>(r: &mut R, total: u8, parts: usize) -> Vec<u8> {
    let mut cuts: Vec<u8> = (1..total).collect();
    cuts.shuffle(r);
    let mut cuts = cuts[..parts - 1].to_vec();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(core::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// Draws a network of `n` nodes in `family` with weights on the tenths grid.
fn draw_network<R: Rng + ?Sized>(r: &mut R, family: Family, n: usize) -> InfoNetwork {
    loop {
        let mut rank: Vec<usize> = (0..n).collect();
        rank.shuffle(r);
        let looped = r.random_range(0..n);
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for v in 0..n {
            let mut options: Vec<usize> = (0..n)
                .filter(|&u| match family {
                    Family::GeneralCycles => u != v,
                    Family::SelfLoopOnly | Family::Acyclic => rank[v] > rank[u],
                })
                .collect();
            options.shuffle(r);
            let degree = r.random_range(0..=options.len().min(MAX_OUT_DEGREE));
            let mut chosen = options[..degree].to_vec();
            if family == Family::SelfLoopOnly && v == looped {
                chosen.truncate(MAX_OUT_DEGREE - 1);
                chosen.push(v);
            }
            chosen.sort_unstable();
            edges.extend(chosen.into_iter().map(|u| (v, u)));
        }
        let mut tenths = Vec::with_capacity(edges.len());
        let mut start = 0;
        while start < edges.len() {
            let v = edges[start].0;
            let d = edges[start..].iter().take_while(|e| e.0 == v).count();
            let total = r.random_range(d as u8..=10);
            tenths.extend(composition(r, total, d));
            start += d;
        }
        let Some(net) = quantized_weights(n, &edges, &tenths) else {
            continue;
        };
        if family == Family::GeneralCycles && net.is_acyclic() {
            continue;
        }
        return net;
    }
}

struct Hit {
    target: NodeId,
    horizon: usize,
    small: u32,
    large: u32,
    element: usize,
    violation: f64,
    tables: [ReachTable; 4],
}

/// Looks for a non-submodular single-node average on `net`, trying
/// horizons, then targets, then seed sets by size.
fn scan(net: &InfoNetwork, params: &SearchParams) -> Result<Option<Hit>> {
    let n = net.node_count() - 1;
    let top = params.horizons.1;
    let mut tables: Vec<ReachTable> = Vec::with_capacity(1 << n);
    for mask in 0u32..1 << n {
        let seeds = SeedSets::new(net, (0..n).filter(|i| mask >> i & 1 == 1).map(NodeId::new), [])?;
        match exact_indicators_cells(net, &seeds, top, params.cell_budget) {
            Ok(e) => tables.push(e.table),
            Err(Error::CellBudgetExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    let mut masks: Vec<u32> = (0u32..1 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for horizon in params.horizons.0..=top {
        for target in 0..n {
            let g = |mask: u32| -> f64 {
                let t = &tables[mask as usize];
                (1..=horizon).map(|s| t.get(s, NodeId::new(target))).sum::<f64>() / horizon as f64
            };
            for &small in &masks {
                for x in (0..n).filter(|x| small >> x & 1 == 0) {
                    let large = small | 1 << x;
                    for w in (0..n).filter(|&w| w != x && small >> w & 1 == 0) {
                        let bit = 1 << w;
                        let d = (g(large | bit) - g(large)) - (g(small | bit) - g(small));
                        if d > MIN_VIOLATION {
                            let pick = |m: u32| tables[m as usize].clone();
                            return Ok(Some(Hit {
                                target: NodeId::new(target),
                                horizon,
                                small,
                                large,
                                element: w,
                                violation: d,
                                tables: [pick(small), pick(small | bit), pick(large), pick(large | bit)],
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Searches small random networks of a family for a failure of
/// submodularity, certified by the cell oracle, and amplifies it into a
/// failure of `σ̄` itself.
///
/// Node counts are tried from `min_nodes` upward; within a node count,
/// network `i` is drawn from `rng::sample_stream(seed ^ n, i)` and the
/// lowest-numbered hit wins, independently of thread count.
pub fn search_counterexample(params: &SearchParams) -> Result<Counterexample> {
    if params.max_nodes > 8 {
        return Err(Error::InvalidArgument("the cell oracle search supports at most 8 nodes".into()));
    }
    if params.horizons.0 == 0 || params.horizons.0 > params.horizons.1 {
        return Err(Error::InvalidArgument("horizon range must be non-empty and start at 1 or more".into()));
    }
    let mut examined = 0u64;
    for n in params.min_nodes.max(1)..=params.max_nodes {
        let stream_seed = params.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut start = 0u64;
        while start < params.attempts {
            let len = BATCH.min(params.attempts - start);
            let found: Vec<Result<Option<(InfoNetwork, Hit)>>> = par::map_indexed(len as usize, |j| {
                let mut r = rng::sample_stream(stream_seed, start + j as u64);
                let net = draw_network(&mut r, params.family, n);
                Ok(scan(&net, params)?.map(|h| (net, h)))
            });
            for (j, f) in found.into_iter().enumerate() {
                if let Some((net, hit)) = f? {
                    return certify(params.family, net, hit, examined + j as u64 + 1, params.cell_budget);
                }
            }
            examined += len;
            start += len;
        }
    }
    Err(Error::NotFound)
}

fn certify(family: Family, base: InfoNetwork, hit: Hit, examined: u64, cell_budget: u64) -> Result<Counterexample> {
    let members = |mask: u32| -> Vec<NodeId> {
        (0..base.node_count() - 1)
            .filter(|i| mask >> i & 1 == 1)
            .map(NodeId::new)
            .collect()
    };
    let small = members(hit.small);
    let large = members(hit.large);
    let element = NodeId::new(hit.element);
    let [s, sw, l, lw] = &hit.tables;
    let gaps = (1..=hit.horizon)
        .map(|t| IndicatorGap {
            time: t,
            gain_small: sw.get(t, hit.target) - s.get(t, hit.target),
            gain_large: lw.get(t, hit.target) - l.get(t, hit.target),
        })
        .collect();

    // Each leaf is active at t exactly when the target was at t - 1, so over
    // one extra step the leaves add `(horizon / amplified) · indicator
    // violation` each, on top of the base network's own second difference.
    let amplified_horizon = hit.horizon + 1;
    let base_violation = witness_violation(&base, amplified_horizon, &small, &large, element, cell_budget)?;
    let per_leaf = hit.violation * hit.horizon as f64 / amplified_horizon as f64;
    let leaves = if base_violation >= per_leaf {
        1
    } else {
        libm::ceil(1.0 - base_violation / per_leaf) as usize
    };
    let network = amplify(&base, hit.target, leaves)?;
    let violation = witness_violation(&network, amplified_horizon, &small, &large, element, cell_budget)?;
    if violation.is_nan() || violation <= MIN_VIOLATION {
        return Err(Error::InvalidArgument("amplified network failed to reproduce the violation".into()));
    }
    Ok(Counterexample {
        family,
        base,
        network,
        target: hit.target,
        horizon: hit.horizon,
        amplified_horizon,
        leaves,
        small,
        large,
        element,
        gaps,
        indicator_violation: hit.violation,
        base_violation,
        violation,
        oracle: "cells",
        networks_examined: examined,
    })
}
