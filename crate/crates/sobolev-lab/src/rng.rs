//! Seeded, counter-based random streams.
//!
//! All Monte Carlo work in the crate draws from the ChaCha8 family: a run is
//! identified by a `u64` seed, and independent substreams are obtained with
//! [`stream_rng`] by setting the ChaCha stream counter. Chunk `c` of a
//! batch-means estimate always uses stream `c`, which is what makes results
//! independent of the worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

/// ChaCha8 generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform direction on the unit sphere `S^{n-1}` (surface measure).
///
/// For `n = 1` this is a fair draw from `{-1, +1}`.
pub fn unit_vector(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}
