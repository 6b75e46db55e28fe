use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{seedable, Budget, Evaluator, Solution};
use crate::diffusion::SeedSets;
use crate::error::{Error, Result};
use crate::network::{InfoNetwork, NodeId};
use crate::par;

pub const DEFAULT_SEARCH_LIMIT: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Calls `f` with every `k`-subset of `items`, in lexicographic index order.
fn for_each_subset(items: &[NodeId], k: usize, f: &mut impl FnMut(&[NodeId])) {
    let n = items.len();
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<NodeId> = Vec::with_capacity(k);
    loop {
        buf.clear();
        buf.extend(idx.iter().map(|&i| items[i]));
        f(&buf);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exhaustive maximum of `σ̄` over disjoint `(A, Â)` within budget.
///
/// Equal values are resolved towards the lexicographically smaller pair of
/// sorted label lists (transient first). Fails when more than `limit`
/// seed pairs would be evaluated.
pub fn brute_force_opt(
    net: &InfoNetwork,
    budget: Budget,
    horizon: usize,
    evaluator: Evaluator,
    limit: u128,
) -> Result<Solution> {
    evaluator.check(net)?;
    let mut nodes = seedable(net);
    nodes.sort_by(|&a, &b| net.label(a).cmp(net.label(b)));
    let n = nodes.len();

    let mut sizes = Vec::new();
    let mut required = 0u128;
    for a in 0..=n {
        for p in 0..=n - a {
            if budget.allows(a, p) {
                sizes.push((a, p));
                required += binomial(n, p) * binomial(n - p, a);
            }
        }
    }
    if required > limit {
        return Err(Error::SearchBudgetExceeded { required, limit });
    }

    let mut configs: Vec<SeedSets> = Vec::with_capacity(required as usize);
    for &(a, p) in &sizes {
        for_each_subset(&nodes, p, &mut |perm: &[NodeId]| {
            let rest: Vec<NodeId> = nodes.iter().copied().filter(|v| !perm.contains(v)).collect();
            for_each_subset(&rest, a, &mut |tr: &[NodeId]| {
                configs.push(SeedSets::new(net, tr.iter().copied(), perm.iter().copied()).expect("seedable nodes"));
            });
        });
    }

    let values: Vec<Result<f64>> =
        par::map_indexed(configs.len(), |i| evaluator.evaluate(net, &configs[i], horizon));
    let key = |s: &SeedSets| {
        let mut t: Vec<&str> = s.transient().iter().map(|&v| net.label(v)).collect();
        let mut p: Vec<&str> = s.permanent().iter().map(|&v| net.label(v)).collect();
        t.sort_unstable();
        p.sort_unstable();
        (t, p)
    };
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        let replace = match best {
            None => true,
            Some((j, bv)) => match v.partial_cmp(&bv) {
                Some(Ordering::Greater) => true,
                Some(Ordering::Equal) => key(&configs[i]) < key(&configs[j]),
                _ => false,
            },
        };
        if replace {
            best = Some((i, v));
        }
    }
    let (i, value) = best.expect("the empty seed pair is always feasible");
    let seeds = configs.swap_remove(i);
    Ok(Solution {
        k: seeds.transient().len(),
        k_hat: seeds.permanent().len(),
        seeds,
        value,
        evaluator: evaluator.tag(),
        evaluations: required as u64,
    })
}
