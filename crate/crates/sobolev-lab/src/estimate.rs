//! Monte Carlo estimates, sweep tables, and the chunked sampling driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{stream_rng, StreamRng};

/// Number of batch-means chunks. Fixed so that estimates are identical for a
/// given seed regardless of how many workers execute the chunks.
pub const BATCH_CHUNKS: u64 = 32;

/// A Monte Carlo scalar: value, standard error, and the sampling identity
/// that produced it. Deterministic quantities carry `stderr = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// An exact (non-sampled) value.
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            stderr: 0.0,
            samples: 0,
            seed: 0,
        }
    }

    /// Rescale the value and its standard error by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Estimate {
            value: self.value * c,
            stderr: self.stderr * c.abs(),
            ..*self
        }
    }

    /// `|value - target| <= k * stderr + abs_slack`.
    pub fn within(&self, target: f64, k_sigma: f64, abs_slack: f64) -> bool {
        (self.value - target).abs() <= k_sigma * self.stderr + abs_slack
    }

    /// Standard error of the product of two independent estimates.
    pub fn product(&self, other: &Estimate) -> Estimate {
        let value = self.value * other.value;
        let stderr = ((self.stderr * other.value).powi(2)
            + (other.stderr * self.value).powi(2))
        .sqrt();
        Estimate {
            value,
            stderr,
            samples: self.samples.max(other.samples),
            seed: self.seed,
        }
    }
}

/// Monte Carlo budget: sample count, seed, and the per-ray subdivision count
/// used when resolving membership indicators along rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub subdivisions: u32,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            subdivisions: 256,
        }
    }

    pub fn with_subdivisions(mut self, subdivisions: u32) -> Self {
        self.subdivisions = subdivisions;
        self
    }
}

/// Sum with a fixed pairwise reduction order (independent of chunking).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Chunked Monte Carlo mean of `per_sample` with batch-means standard error.
///
/// The requested sample count is rounded up to a multiple of
/// [`BATCH_CHUNKS`]; chunk `c` draws from stream `c` of the seed. Chunks run
/// in parallel but are reduced in index order, so the result depends only on
/// `(seed, samples)`.
pub fn monte_carlo<F>(samples: u64, seed: u64, per_sample: F) -> Estimate
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let per_chunk = samples.div_ceil(BATCH_CHUNKS).max(1);
    let total = per_chunk * BATCH_CHUNKS;
    let chunk_means: Vec<f64> = (0..BATCH_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let mut acc = 0.0;
            for _ in 0..per_chunk {
                acc += per_sample(&mut rng);
            }
            acc / per_chunk as f64
        })
        .collect();
    from_chunk_means(&chunk_means, total, seed)
}

/// Fallible variant of [`monte_carlo`]: the first error aborts the estimate.
pub fn try_monte_carlo<F>(samples: u64, seed: u64, per_sample: F) -> crate::Result<Estimate>
where
    F: Fn(&mut StreamRng) -> crate::Result<f64> + Sync,
{
    let per_chunk = samples.div_ceil(BATCH_CHUNKS).max(1);
    let total = per_chunk * BATCH_CHUNKS;
    let chunk_means: Vec<f64> = (0..BATCH_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let mut acc = 0.0;
            for _ in 0..per_chunk {
                acc += per_sample(&mut rng)?;
            }
            Ok(acc / per_chunk as f64)
        })
        .collect::<crate::Result<_>>()?;
    Ok(from_chunk_means(&chunk_means, total, seed))
}

fn from_chunk_means(chunk_means: &[f64], total: u64, seed: u64) -> Estimate {
    let c = chunk_means.len() as f64;
    let mean = pairwise_sum(chunk_means) / c;
    let ss: f64 = chunk_means.iter().map(|m| (m - mean).powi(2)).sum();
    let stderr = (ss / (c * (c - 1.0))).sqrt();
    Estimate {
        value: mean,
        stderr,
        samples: total,
        seed,
    }
}

/// Outcome of a verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One sweep row: a parameter value, the scaled estimate at that parameter,
/// its standard error, the analytic reference, and the relative error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub value: f64,
    pub stderr: f64,
    pub reference: f64,
    pub rel_error: f64,
}

impl SweepRow {
    pub fn new(param: f64, est: &Estimate, reference: f64) -> Self {
        SweepRow {
            param,
            value: est.value,
            stderr: est.stderr,
            reference,
            rel_error: (est.value - reference).abs() / reference.abs().max(1e-30),
        }
    }
}

/// Linear-in-`h` extrapolation of the last two sweep rows to `h = 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Extrapolated {
    pub value: f64,
    pub stderr: f64,
}

/// A parameter sweep with references and a verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub verdict: Verdict,
    pub extrapolated: Option<Extrapolated>,
}

impl SweepTable {
    /// Richardson step: model `value(h) = L + C h` from the last two rows,
    /// where `h = to_h(param)` is the distance to the limit.
    pub fn extrapolate(&mut self, to_h: impl Fn(f64) -> f64) {
        if self.rows.len() < 2 {
            return;
        }
        let a = &self.rows[self.rows.len() - 2];
        let b = &self.rows[self.rows.len() - 1];
        let (ha, hb) = (to_h(a.param), to_h(b.param));
        if (ha - hb).abs() < 1e-300 {
            return;
        }
        let slope = (b.value - a.value) / (hb - ha);
        let value = b.value - slope * hb;
        // Worst-case linear propagation of the two row errors.
        let wa = hb / (ha - hb);
        let wb = 1.0 + hb / (ha - hb);
        let stderr = ((wa * a.stderr).powi(2) + (wb * b.stderr).powi(2)).sqrt();
        self.extrapolated = Some(Extrapolated { value, stderr });
    }
}

/// Log-spaced grid from `lo` to `hi` inclusive with `per_decade` points per
/// factor of ten (at least two points).
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo);
    let decades = (hi / lo).log10();
    let count = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    (0..count)
        .map(|i| lo * 10f64.powf(decades * i as f64 / (count - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_mean_of_uniform() {
        use rand::Rng;
        let est = monte_carlo(100_000, 3, |rng| rng.random::<f64>());
        assert!((est.value - 0.5).abs() < 4.0 * est.stderr);
        assert!(est.stderr > 0.0 && est.stderr < 0.01);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        use rand::Rng;
        let a = monte_carlo(10_000, 11, |rng| rng.random::<f64>().powi(2));
        let b = monte_carlo(10_000, 11, |rng| rng.random::<f64>().powi(2));
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn log_grid_spans_and_sorts() {
        let g = log_grid(1e-2, 1.0, 16);
        assert!((g[0] - 1e-2).abs() < 1e-12);
        assert!((g.last().unwrap() - 1.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.len() >= 33);
    }

    #[test]
    fn extrapolation_kills_linear_term() {
        // value(h) = 2 + 3h sampled at h = 0.2 and 0.1.
        let rows = vec![
            SweepRow {
                param: 0.2,
                value: 2.6,
                stderr: 0.0,
                reference: 2.0,
                rel_error: 0.3,
            },
            SweepRow {
                param: 0.1,
                value: 2.3,
                stderr: 0.0,
                reference: 2.0,
                rel_error: 0.15,
            },
        ];
        let mut table = SweepTable {
            rows,
            verdict: Verdict::Pass,
            extrapolated: None,
        };
        table.extrapolate(|p| p);
        let ex = table.extrapolated.unwrap();
        assert!((ex.value - 2.0).abs() < 1e-12);
    }
}
