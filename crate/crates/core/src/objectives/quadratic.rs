use crate::error::{Error, Result};
use crate::objectives::Objective;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Strongly convex quadratic `f(theta) = 0.5 * theta' A theta` with a
/// symmetric positive definite `A`. The minimizer is the origin and the
/// strong convexity constant is the smallest eigenvalue of `A`.
pub struct Quadratic {
    matrix: Vec<f64>, // row-major d x d, symmetric
    dimension: usize,
    minimizer: Vec<f64>,
    strong_convexity: f64,
}

impl Quadratic {
    /// Random SPD quadratic with eigenvalues spanning `[1, condition_number]`
    /// (linearly spaced), deterministic from `seed`. The eigenbasis comes
    /// from Gram-Schmidt orthonormalization of a seeded Gaussian matrix.
    pub fn seeded(dimension: usize, condition_number: f64, seed: u64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        if !(condition_number >= 1.0 && condition_number.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "condition_number must be >= 1, got {condition_number}"
            )));
        }
        let d = dimension;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_orthonormal(d, &mut rng);
        let eigenvalues: Vec<f64> = (0..d)
            .map(|i| {
                if d == 1 {
                    1.0
                } else {
                    1.0 + (condition_number - 1.0) * i as f64 / (d - 1) as f64
                }
            })
            .collect();

        // A = Q diag(lambda) Q', symmetrized against rounding
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..d {
                    s += q[i * d + k] * eigenvalues[k] * q[j * d + k];
                }
                a[i * d + j] = s;
                a[j * d + i] = s;
            }
        }
        Ok(Self {
            matrix: a,
            dimension: d,
            minimizer: vec![0.0; d],
            strong_convexity: 1.0,
        })
    }

    /// `0.5 * ||theta||^2`: the identity matrix, exactly.
    pub fn identity(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        let mut matrix = vec![0.0; dimension * dimension];
        for i in 0..dimension {
            matrix[i * dimension + i] = 1.0;
        }
        Ok(Self {
            matrix,
            dimension,
            minimizer: vec![0.0; dimension],
            strong_convexity: 1.0,
        })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }
}

/// Orthonormal basis of a random Gaussian matrix via modified Gram-Schmidt,
/// stored row-major (rows are the basis vectors).
fn random_orthonormal(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut q = vec![0.0; d * d];
    for row in 0..d {
        loop {
            for k in 0..d {
                q[row * d + k] = rng.sample::<f64, _>(StandardNormal);
            }
            for prev in 0..row {
                let mut proj = 0.0;
                for k in 0..d {
                    proj += q[row * d + k] * q[prev * d + k];
                }
                for k in 0..d {
                    q[row * d + k] -= proj * q[prev * d + k];
                }
            }
            let norm = (0..d).map(|k| q[row * d + k] * q[row * d + k]).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for k in 0..d {
                    q[row * d + k] /= norm;
                }
                break;
            }
            // a nearly dependent draw: try again
        }
    }
    q
}

impl Objective for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval(&self, params: &[f64]) -> f64 {
        let d = self.dimension;
        let mut acc = 0.0;
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.matrix[i * d + j] * params[j];
            }
            acc += params[i] * row;
        }
        0.5 * acc
    }

    fn grad(&self, params: &[f64]) -> Vec<f64> {
        let d = self.dimension;
        let mut g = vec![0.0; d];
        for i in 0..d {
            let mut row = 0.0;
            for j in 0..d {
                row += self.matrix[i * d + j] * params[j];
            }
            g[i] = row;
        }
        g
    }

    fn minimizer(&self) -> Option<&[f64]> {
        Some(&self.minimizer)
    }

    fn strong_convexity(&self) -> Option<f64> {
        Some(self.strong_convexity)
    }
}
