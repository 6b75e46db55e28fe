use alloc::vec::Vec;

use super::{rng, run_nlt, SeedSets, ThresholdConfig};
use crate::error::{Error, Result};
use crate::network::InfoNetwork;
use crate::par;

const CHUNK: usize = 256;

/// Sample mean of the influence with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples`; zero for a single sample.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Per-(t, v) activation frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorEstimate {
    pub horizon: usize,
    pub nodes: usize,
    pub samples: usize,
    counts: Vec<u64>,
}

impl IndicatorEstimate {
    /// Activation counts, time-major.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mean(&self, t: usize, v: usize) -> f64 {
        self.counts[t * self.nodes + v] as f64 / self.samples as f64
    }

    /// Standard error of a Bernoulli frequency.
    pub fn stderr(&self, t: usize, v: usize) -> f64 {
        let n = self.samples as f64;
        if self.samples < 2 {
            return 0.0;
        }
        let p = self.mean(t, v);
        libm::sqrt(p * (1.0 - p) * n / (n - 1.0) / n)
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        Err(Error::InvalidArgument("at least one sample is required".into()))
    } else {
        Ok(())
    }
}

/// Estimates the expected influence by averaging independent runs.
///
/// Sample `i` draws its thresholds from `rng::sample_stream(seed, i)`. Sums
/// are accumulated as integer counts, so the result does not depend on how
/// samples are spread over threads.
pub fn monte_carlo_influence(
    net: &InfoNetwork,
    seeds: &SeedSets,
    horizon: usize,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_samples(samples)?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<(u64, u128)>> = par::map_indexed(chunks, |c| {
        let mut sum = 0u64;
        let mut sum_sq = 0u128;
        for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
            let theta = ThresholdConfig::sample(net, &mut rng::sample_stream(seed, i as u64));
            let total = run_nlt(net, seeds, &theta, horizon)?.total_active(net) as u64;
            sum += total;
            sum_sq += u128::from(total) * u128::from(total);
        }
        Ok((sum, sum_sq))
    });
    let (mut sum, mut sum_sq) = (0u64, 0u128);
    for p in partial {
        let (s, q) = p?;
        sum += s;
        sum_sq += q;
    }
    let n = samples as f64;
    let h = horizon as f64;
    let mean_total = sum as f64 / n;
    let stderr = if samples > 1 {
        let var = (sum_sq as f64 - n * mean_total * mean_total) / (n - 1.0);
        libm::sqrt(var.max(0.0) / n) / h
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean: mean_total / h,
        stderr,
        samples,
        seed,
    })
}

/// Estimates `E[X_v^t]` for every node and time with the same sample streams
/// as [`monte_carlo_influence`].
pub fn monte_carlo_indicators(
    net: &InfoNetwork,
    seeds: &SeedSets,
    horizon: usize,
    samples: usize,
    seed: u64,
) -> Result<IndicatorEstimate> {
    check_samples(samples)?;
    let n = net.node_count();
    let cells = (horizon + 1) * n;
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<Vec<u64>>> = par::map_indexed(chunks, |c| {
        let mut counts = alloc::vec![0u64; cells];
        for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
            let theta = ThresholdConfig::sample(net, &mut rng::sample_stream(seed, i as u64));
            let traj = run_nlt(net, seeds, &theta, horizon)?;
            for t in 0..=horizon {
                for (v, &a) in traj.row(t).iter().enumerate() {
                    counts[t * n + v] += u64::from(a);
                }
            }
        }
        Ok(counts)
    });
    let mut counts = alloc::vec![0u64; cells];
    for p in partial {
        for (acc, x) in counts.iter_mut().zip(p?) {
            *acc += x;
        }
    }
    Ok(IndicatorEstimate {
        horizon,
        nodes: n,
        samples,
        counts,
    })
}
