//! Exact expectations by integrating over threshold space.
//!
//! A trajectory depends on `θ_v` only through comparisons `f_v ≥ θ_v`, and
//! `f_v` ranges over subset sums of `v`'s out-weights. Threshold space
//! therefore splits into boxes on which the trajectory is constant; the
//! expectation is the volume-weighted sum over those boxes. Nothing here
//! assumes acyclicity.

use alloc::vec::Vec;

use super::ReachTable;
use crate::diffusion::{activation, run_nlt, SeedSets, ThresholdConfig};
use crate::error::{Error, Result};
use crate::network::{InfoNetwork, NodeId};

pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

/// Subset-sum levels closer than this are merged.
const LEVEL_MERGE: f64 = 1e-12;

/// Out-degree above which subset sums are not enumerated.
const MAX_ENUMERATED_DEGREE: usize = 20;

/// Expected indicators from the cell oracle, with the number of boxes visited.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEvaluation {
    pub table: ReachTable,
    pub cells: u64,
}

/// Attainable activation levels per node and the induced intervals of `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    /// Sorted breakpoints `0 = l_0 < l_1 < ... < l_k = 1` per node; a node
    /// whose threshold never matters has just `[0, 1]`.
    breakpoints: Vec<Vec<f64>>,
}

impl CellPartition {
    /// Levels are subset sums of non-void out-weights; permanent seeds and
    /// the void node get a single interval.
    pub fn new(net: &InfoNetwork, permanent: &[bool]) -> Result<Self> {
        let void = net.void().index();
        let mut breakpoints = Vec::with_capacity(net.node_count());
        for (v, &fixed) in permanent.iter().enumerate().take(net.node_count()) {
            if v == void || fixed {
                breakpoints.push(alloc::vec![0.0, 1.0]);
                continue;
            }
            let weights: Vec<f64> = net
                .out_edges(NodeId::new(v))
                .filter(|&(u, _)| !net.is_void(u))
                .map(|(_, w)| w)
                .collect();
            if weights.len() > MAX_ENUMERATED_DEGREE {
                return Err(Error::CellBudgetExceeded {
                    budget: DEFAULT_CELL_BUDGET,
                });
            }
            let mut levels = alloc::vec![0.0];
            for mask in 1u32..(1 << weights.len()) {
                let s: f64 = weights
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, w)| w)
                    .sum();
                levels.push(s);
            }
            levels.push(1.0);
            levels.sort_by(f64::total_cmp);
            let mut merged: Vec<f64> = Vec::with_capacity(levels.len());
            for l in levels {
                let l = l.clamp(0.0, 1.0);
                match merged.last() {
                    Some(&last) if l - last <= LEVEL_MERGE => {}
                    _ => merged.push(l),
                }
            }
            // The top level may have merged into a sum just below one.
            *merged.last_mut().unwrap() = 1.0;
            breakpoints.push(merged);
        }
        Ok(CellPartition { breakpoints })
    }

    /// Intervals `(l_i, l_{i+1})` of node `v`; their lengths sum to one.
    pub fn intervals(&self, v: NodeId) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breakpoints[v.index()].windows(2).map(|w| (w[0], w[1]))
    }

    /// Number of product cells, saturating.
    pub fn cell_count(&self) -> u128 {
        self.breakpoints
            .iter()
            .fold(1u128, |acc, b| acc.saturating_mul((b.len() - 1) as u128))
    }
}

/// Enumerates every product cell of [`CellPartition`], running the process
/// once at each cell's midpoint. Exponential in the node count; used to
/// cross-check [`exact_indicators_cells`].
pub fn exact_indicators_cell_product(
    net: &InfoNetwork,
    seeds: &SeedSets,
    horizon: usize,
    budget: u64,
) -> Result<ReachTable> {
    let n = net.node_count();
    let (_, permanent) = seeds.masks(n);
    let partition = CellPartition::new(net, &permanent)?;
    if partition.cell_count() > u128::from(budget) {
        return Err(Error::CellBudgetExceeded { budget });
    }
    let radix: Vec<usize> = partition.breakpoints[..n - 1]
        .iter()
        .map(|b| b.len() - 1)
        .collect();
    let mut digit = alloc::vec![0usize; n - 1];
    let mut acc = alloc::vec![0.0; (horizon + 1) * n];
    loop {
        let mut volume = 1.0;
        let mut theta = Vec::with_capacity(n - 1);
        for (v, &d) in digit.iter().enumerate() {
            let b = &partition.breakpoints[v];
            volume *= b[d + 1] - b[d];
            theta.push(0.5 * (b[d] + b[d + 1]));
        }
        let theta = ThresholdConfig::from_values(net, theta)?;
        let traj = run_nlt(net, seeds, &theta, horizon)?;
        for t in 0..=horizon {
            for (v, &a) in traj.row(t).iter().enumerate() {
                if a {
                    acc[t * n + v] += volume;
                }
            }
        }
        // Mixed-radix increment.
        let mut i = 0;
        loop {
            if i == digit.len() {
                return Ok(ReachTable::new(horizon, n, acc));
            }
            digit[i] += 1;
            if digit[i] < radix[i] {
                break;
            }
            digit[i] = 0;
            i += 1;
        }
    }
}

struct Explorer<'a> {
    net: &'a InfoNetwork,
    permanent: Vec<bool>,
    horizon: usize,
    n: usize,
    acc: Vec<f64>,
    cells: u64,
    budget: u64,
}

impl Explorer<'_> {
    /// Continues the simulation from node `v` at time `t`, splitting the
    /// current box whenever a comparison is not yet decided by it.
    fn explore(
        &mut self,
        rows: &mut [bool],
        mut t: usize,
        mut v: usize,
        lo: &mut [f64],
        hi: &mut [f64],
        mass: f64,
    ) -> Result<()> {
        let n = self.n;
        let void = n - 1;
        while t <= self.horizon {
            if v == n {
                t += 1;
                v = 0;
                continue;
            }
            let idx = t * n + v;
            if v == void {
                rows[idx] = false;
            } else if self.permanent[v] {
                rows[idx] = true;
            } else {
                let f = activation(self.net, v, &rows[(t - 1) * n..t * n]);
                if f >= hi[v] {
                    rows[idx] = true;
                } else if f <= lo[v] {
                    rows[idx] = false;
                } else {
                    let (l, h) = (lo[v], hi[v]);
                    let width = h - l;
                    rows[idx] = true;
                    hi[v] = f;
                    self.explore(rows, t, v + 1, lo, hi, mass * ((f - l) / width))?;
                    hi[v] = h;
                    rows[idx] = false;
                    lo[v] = f;
                    self.explore(rows, t, v + 1, lo, hi, mass * ((h - f) / width))?;
                    lo[v] = l;
                    return Ok(());
                }
            }
            v += 1;
        }
        self.cells += 1;
        if self.cells > self.budget {
            return Err(Error::CellBudgetExceeded {
                budget: self.budget,
            });
        }
        for (a, &active) in self.acc.iter_mut().zip(rows.iter()) {
            if active {
                *a += mass;
            }
        }
        Ok(())
    }
}

/// Exact `E[X_v^t(A, Â)]` for all `(t, v)` on any network.
///
/// Only boxes that the process actually distinguishes are visited: a node's
/// interval is split at `f_v` the first time `f_v` falls strictly inside it.
/// `budget` caps the number of boxes.
pub fn exact_indicators_cells(
    net: &InfoNetwork,
    seeds: &SeedSets,
    horizon: usize,
    budget: u64,
) -> Result<CellEvaluation> {
    let n = net.node_count();
    let (transient, permanent) = seeds.masks(n);
    let mut rows = alloc::vec![false; (horizon + 1) * n];
    for v in 0..n {
        rows[v] = transient[v] || permanent[v];
    }
    let mut lo = alloc::vec![0.0; n];
    let mut hi = alloc::vec![1.0; n];
    let mut ex = Explorer {
        net,
        permanent,
        horizon,
        n,
        acc: alloc::vec![0.0; (horizon + 1) * n],
        cells: 0,
        budget,
    };
    ex.explore(&mut rows, 1, 0, &mut lo, &mut hi, 1.0)?;
    Ok(CellEvaluation {
        table: ReachTable::new(horizon, n, ex.acc),
        cells: ex.cells,
    })
}

/// Exact `σ̄(A, Â)` on any network, within the default cell budget.
pub fn exact_influence_cells(net: &InfoNetwork, seeds: &SeedSets, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(exact_indicators_cells(net, seeds, horizon, DEFAULT_CELL_BUDGET)?
        .table
        .influence(net))
}
