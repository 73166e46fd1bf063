//! Shared fixtures for the criterion benchmarks.

use dwmgrad::ParamVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic gradient vector with entries in [-1, 1).
pub fn fixed_gradient(dimension: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn start_params(dimension: usize) -> ParamVector {
    ParamVector::filled(dimension, 0.5).expect("dimension >= 1")
}
