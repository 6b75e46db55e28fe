use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{gain_over, label_ranks, seedable, Budget, Candidate, Evaluator, Role, Solution};
use crate::diffusion::SeedSets;
use crate::error::Result;
use crate::network::InfoNetwork;
use crate::par;

/// Stale bounds within this distance of the best fresh gain are re-evaluated,
/// which absorbs rounding in otherwise-equal gains.
const LAZY_SLACK: f64 = 1e-9;

struct Round<'a> {
    net: &'a InfoNetwork,
    horizon: usize,
    evaluator: Evaluator,
    rank: &'a [usize],
    evaluations: u64,
}

impl Round<'_> {
    /// Greedy preference: larger gain, then permanent before transient, then label.
    fn better(&self, a: (Candidate, f64), b: (Candidate, f64)) -> bool {
        match a.1.partial_cmp(&b.1) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Less) => false,
            _ => (a.0.role, self.rank[a.0.node.index()]) < (b.0.role, self.rank[b.0.node.index()]),
        }
    }

    fn gain(&mut self, seeds: &SeedSets, base: f64, c: Candidate) -> Result<f64> {
        self.evaluations += 1;
        gain_over(self.net, seeds, Some(base), c, self.horizon, self.evaluator)
    }

    fn best_of(&self, scored: impl IntoIterator<Item = (Candidate, f64)>) -> Option<(Candidate, f64)> {
        let mut best: Option<(Candidate, f64)> = None;
        for s in scored {
            if best.is_none_or(|b| self.better(s, b)) {
                best = Some(s);
            }
        }
        best
    }
}

fn feasible(
    candidates: &[Candidate],
    seeds: &SeedSets,
    room_transient: bool,
    room_permanent: bool,
) -> Vec<usize> {
    (0..candidates.len())
        .filter(|&i| {
            let c = candidates[i];
            !seeds.contains(c.node)
                && match c.role {
                    Role::Transient => room_transient,
                    Role::Permanent => room_permanent,
                }
        })
        .collect()
}

fn greedy_split(
    round: &mut Round<'_>,
    candidates: &[Candidate],
    k: usize,
    k_hat: usize,
    lazy: bool,
) -> Result<(SeedSets, f64)> {
    let mut seeds = SeedSets::empty();
    round.evaluations += 1;
    let mut base = round.evaluator.evaluate(round.net, &seeds, round.horizon)?;
    // Upper bounds on current gains, from earlier rounds.
    let mut bound: Vec<Option<f64>> = alloc::vec![None; candidates.len()];
    loop {
        let open = feasible(
            candidates,
            &seeds,
            seeds.transient().len() < k,
            seeds.permanent().len() < k_hat,
        );
        if open.is_empty() {
            break;
        }
        let chosen = if lazy && bound.iter().any(Option::is_some) {
            let mut order = open.clone();
            order.sort_by(|&a, &b| {
                let (ba, bb) = (bound[a].unwrap_or(f64::INFINITY), bound[b].unwrap_or(f64::INFINITY));
                if round.better((candidates[a], ba), (candidates[b], bb)) {
                    Ordering::Less
                } else if round.better((candidates[b], bb), (candidates[a], ba)) {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            });
            let mut fresh: Vec<(Candidate, f64)> = Vec::new();
            let mut best_fresh = f64::NEG_INFINITY;
            for i in order {
                let b = bound[i].unwrap_or(f64::INFINITY);
                if b < best_fresh - LAZY_SLACK {
                    break;
                }
                let g = round.gain(&seeds, base, candidates[i])?;
                bound[i] = Some(g);
                best_fresh = best_fresh.max(g);
                fresh.push((candidates[i], g));
            }
            round.best_of(fresh)
        } else {
            let net = round.net;
            let (horizon, evaluator) = (round.horizon, round.evaluator);
            let gains: Vec<Result<f64>> = par::map_indexed(open.len(), |j| {
                gain_over(net, &seeds, Some(base), candidates[open[j]], horizon, evaluator)
            });
            round.evaluations += open.len() as u64;
            let mut scored = Vec::with_capacity(open.len());
            for (&i, g) in open.iter().zip(gains) {
                let g = g?;
                bound[i] = Some(g);
                scored.push((candidates[i], g));
            }
            round.best_of(scored)
        };
        match chosen {
            Some((c, g)) if g > 0.0 => {
                seeds = c.apply(&seeds);
                round.evaluations += 1;
                base = round.evaluator.evaluate(round.net, &seeds, round.horizon)?;
            }
            _ => break,
        }
    }
    Ok((seeds, base))
}

/// Greedy maximization of `σ̄` over every budget split, keeping the best.
///
/// Within a split the element with the largest marginal gain is added until
/// no feasible element has a positive gain. Equal gains prefer permanent
/// seeds, then smaller labels. With `lazy`, stale gains from earlier rounds
/// serve as upper bounds and only the elements that could still win are
/// re-evaluated; on acyclic networks with an exact evaluator this returns
/// the same solution as the eager scan.
pub fn greedy_max(
    net: &InfoNetwork,
    budget: Budget,
    horizon: usize,
    evaluator: Evaluator,
    lazy: bool,
) -> Result<Solution> {
    evaluator.check(net)?;
    let nodes = seedable(net);
    let rank = label_ranks(net);
    let mut candidates = Vec::with_capacity(2 * nodes.len());
    for &v in &nodes {
        candidates.push(Candidate { node: v, role: Role::Permanent });
        candidates.push(Candidate { node: v, role: Role::Transient });
    }
    let mut round = Round {
        net,
        horizon,
        evaluator,
        rank: &rank,
        evaluations: 0,
    };

    let mut best: Option<Solution> = None;
    for (k, k_hat) in budget.splits(nodes.len()) {
        let (seeds, value) = greedy_split(&mut round, &candidates, k, k_hat, lazy)?;
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Solution {
                seeds,
                value,
                evaluator: evaluator.tag(),
                evaluations: 0,
                k,
                k_hat,
            });
        }
    }
    let mut best = best.expect("at least the empty split is feasible");
    best.evaluations = round.evaluations;
    Ok(best)
}
