//! Differentiable scalar test problems with hand-derived analytic gradients,
//! synthetic data generation, and a finite-difference gradient checker.

mod dataset;
mod logistic;
mod mlp;
mod quadratic;
mod rosenbrock;

pub use dataset::SyntheticDataset;
pub use logistic::{LinearRegression, LogisticRegression};
pub use mlp::TinyMlp;
pub use quadratic::Quadratic;
pub use rosenbrock::Rosenbrock;

use crate::error::{Error, Result};

/// A differentiable scalar function with an analytic gradient.
///
/// Objectives are immutable after construction: repeated `eval`/`grad` calls
/// at the same point return identical values, and shared references may be
/// evaluated concurrently.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn eval(&self, params: &[f64]) -> f64;

    fn grad(&self, params: &[f64]) -> Vec<f64>;

    /// Known minimizer, when one exists analytically.
    fn minimizer(&self) -> Option<&[f64]> {
        None
    }

    /// Strong convexity constant, when known.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    /// Number of samples for dataset-backed objectives; `None` otherwise.
    fn num_samples(&self) -> Option<usize> {
        None
    }

    /// Loss restricted to the given sample indices. Dataset-backed
    /// objectives override this; others ignore the batch.
    fn eval_batch(&self, params: &[f64], batch: &[usize]) -> f64 {
        let _ = batch;
        self.eval(params)
    }

    /// Gradient restricted to the given sample indices.
    fn grad_batch(&self, params: &[f64], batch: &[usize]) -> Vec<f64> {
        let _ = batch;
        self.grad(params)
    }
}

/// Maximum over coordinates of the relative error between the analytic
/// gradient and a central finite difference with step `h`.
///
/// The relative error in coordinate `i` is
/// `|analytic_i - fd_i| / max(1, |analytic_i|, |fd_i|)`.
pub fn gradient_check(objective: &dyn Objective, point: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!("h must be > 0, got {h}")));
    }
    if point.len() != objective.dimension() {
        return Err(Error::ShapeMismatch {
            expected: objective.dimension(),
            got: point.len(),
        });
    }
    let analytic = objective.grad(point);
    let mut probe = point.to_vec();
    let mut worst = 0.0f64;
    for i in 0..point.len() {
        probe[i] = point[i] + h;
        let fp = objective.eval(&probe);
        probe[i] = point[i] - h;
        let fm = objective.eval(&probe);
        probe[i] = point[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFiniteInput(format!(
                "objective evaluated non-finite at finite-difference probe {i}"
            )));
        }
        let fd = (fp - fm) / (2.0 * h);
        let denom = 1.0f64.max(analytic[i].abs()).max(fd.abs());
        worst = worst.max((analytic[i] - fd).abs() / denom);
    }
    Ok(worst)
}
