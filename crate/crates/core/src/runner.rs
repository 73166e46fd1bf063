//! Drives one optimizer over one objective for a fixed step budget,
//! recording a [`Trajectory`].

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::optim::{Optimizer, StepInput};
use crate::trajectory::{RunMeta, Trajectory, TrajectoryRecord};
use crate::vector::{inf_norm, ParamVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct DriveOptions {
    /// Step budget, >= 1. The convergence test of the usual while-loop is
    /// replaced by this fixed budget plus the optional `stop_loss`.
    pub iterations: u64,
    /// Record every k-th step (the final executed step is always recorded).
    pub log_every: u64,
    /// Snapshot the raw parameters into every record (needed by the
    /// parameter-level audits).
    pub log_params: bool,
    /// Stop early once the loss falls below this value.
    pub stop_loss: Option<f64>,
    /// Uniform-with-replacement mini-batch size for dataset-backed
    /// objectives; full batch when absent.
    pub batch_size: Option<usize>,
    /// Seed for mini-batch sampling (and recorded in the meta block).
    pub seed: u64,
}

impl Default for DriveOptions {
    fn default() -> Self {
        Self {
            iterations: 1000,
            log_every: 1,
            log_params: false,
            stop_loss: None,
            batch_size: None,
            seed: 0,
        }
    }
}

/// Why a run stopped before its budget with a numerical problem.
#[derive(Debug, Clone, PartialEq)]
pub enum RunFailure {
    /// The objective evaluated non-finite; the partial trajectory holds
    /// every step completed before the failure.
    NonFiniteLoss { step: u64, loss: f64 },
    /// The optimizer rejected the step input or diverged.
    StepFailed { step: u64, message: String },
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunFailure::NonFiniteLoss { step, loss } => {
                write!(f, "loss became {loss} at step {step}")
            }
            RunFailure::StepFailed { step, message } => {
                write!(f, "step {step} failed: {message}")
            }
        }
    }
}

/// A completed or aborted run. `failure` is `None` for a clean run; on
/// failure the trajectory holds the steps that completed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub failure: Option<RunFailure>,
}

/// Run `optimizer` on `objective` from `start` under `options`.
///
/// Configuration problems (zero budget, shape mismatch, mini-batching a
/// sampleless objective) error out before any step runs; numerical failures
/// mid-run come back as `RunOutput::failure` with the partial trajectory.
pub fn drive(
    optimizer: &mut dyn Optimizer,
    objective: &dyn Objective,
    start: &ParamVector,
    options: &DriveOptions,
) -> Result<RunOutput> {
    if options.iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be >= 1".into()));
    }
    if options.log_every == 0 {
        return Err(Error::InvalidConfig("log_every must be >= 1".into()));
    }
    if start.len() != objective.dimension() {
        return Err(Error::ShapeMismatch {
            expected: objective.dimension(),
            got: start.len(),
        });
    }
    if start.len() != optimizer.dimension() {
        return Err(Error::ShapeMismatch {
            expected: optimizer.dimension(),
            got: start.len(),
        });
    }
    let samples = objective.num_samples();
    if let Some(b) = options.batch_size {
        if b == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if samples.is_none() {
            return Err(Error::InvalidConfig(format!(
                "objective '{}' has no samples to mini-batch",
                objective.name()
            )));
        }
    }

    let meta = RunMeta {
        optimizer: optimizer.name().to_string(),
        objective: objective.name().to_string(),
        seed: options.seed,
        iterations: options.iterations,
        log_every: options.log_every,
        log_params: options.log_params,
        alpha0: optimizer.base_rate(),
        delta: optimizer.window_limit(),
        gamma_init: optimizer.initial_momentum_fill(),
        start_point: start.as_slice().to_vec(),
        stop_loss: options.stop_loss,
        batch_size: options.batch_size,
    };

    let mut params = start.clone();
    let mut records = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut batch = Vec::new();
    let mut failure = None;

    for step in 0..options.iterations {
        let (loss, gradient) = match (options.batch_size, samples) {
            (Some(b), Some(n)) => {
                batch.clear();
                batch.extend((0..b).map(|_| rng.gen_range(0..n)));
                let probe = optimizer.lookahead_point(&params);
                (
                    objective.eval_batch(&params, &batch),
                    objective.grad_batch(&probe, &batch),
                )
            }
            _ => {
                let probe = optimizer.lookahead_point(&params);
                (objective.eval(&params), objective.grad(&probe))
            }
        };

        if !loss.is_finite() {
            failure = Some(RunFailure::NonFiniteLoss { step, loss });
            break;
        }
        if let Some(threshold) = options.stop_loss {
            if loss < threshold {
                break;
            }
        }

        let grad_norm = inf_norm(&gradient);
        let stats = match optimizer.step(
            &mut params,
            StepInput {
                gradient: &gradient,
                loss,
            },
        ) {
            Ok(stats) => stats,
            Err(e) => {
                failure = Some(RunFailure::StepFailed {
                    step,
                    message: e.to_string(),
                });
                break;
            }
        };

        let is_last = step + 1 == options.iterations;
        if step % options.log_every == 0 || is_last {
            records.push(TrajectoryRecord {
                step,
                loss,
                omega: stats.omega,
                grad_norm,
                momentum_norm: stats.momentum_norm,
                lr_min: stats.lr_min,
                lr_mean: stats.lr_mean,
                lr_max: stats.lr_max,
                update_norm: stats.update_norm,
                lr_ceiling_flag: stats.lr_ceiling,
                params: options.log_params.then(|| params.as_slice().to_vec()),
            });
        }
    }

    let final_loss = objective.eval(&params);
    Ok(RunOutput {
        trajectory: Trajectory {
            meta,
            records,
            final_params: params.into_vec(),
            final_loss,
        },
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Quadratic, Rosenbrock};
    use crate::optim::{DwmGrad, DwmGradConfig, Sgd};

    #[test]
    fn fixed_budget_produces_one_record_per_step() {
        let objective = Rosenbrock::new();
        let mut opt = DwmGrad::new(DwmGradConfig::default(), 2).unwrap();
        let start = ParamVector::new(vec![-1.2, 1.0]).unwrap();
        let out = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                iterations: 100,
                log_params: true,
                ..DriveOptions::default()
            },
        )
        .unwrap();
        assert!(out.failure.is_none());
        assert_eq!(out.trajectory.records.len(), 100);
        out.trajectory.require_contiguous().unwrap();
        assert_eq!(out.trajectory.params_sequence().unwrap().len(), 101);
    }

    #[test]
    fn rejects_zero_iterations() {
        let objective = Rosenbrock::new();
        let mut opt = Sgd::new(0.1, 2).unwrap();
        let start = ParamVector::zeros(2).unwrap();
        let err = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                iterations: 0,
                ..DriveOptions::default()
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn diverging_run_reports_partial_trajectory() {
        let objective = Rosenbrock::new();
        // absurd learning rate: the quartic blows up to infinity quickly
        let mut opt = Sgd::new(1e6, 2).unwrap();
        let start = ParamVector::new(vec![-1.2, 1.0]).unwrap();
        let out = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                iterations: 1000,
                ..DriveOptions::default()
            },
        )
        .unwrap();
        assert!(out.failure.is_some());
        assert!(out.trajectory.records.len() < 1000);
    }

    #[test]
    fn stop_loss_ends_the_run_early() {
        let objective = Quadratic::identity(2).unwrap();
        let mut opt = Sgd::new(0.5, 2).unwrap();
        let start = ParamVector::new(vec![4.0, -4.0]).unwrap();
        let out = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                iterations: 10_000,
                stop_loss: Some(1e-6),
                ..DriveOptions::default()
            },
        )
        .unwrap();
        assert!(out.failure.is_none());
        assert!(out.trajectory.records.len() < 10_000);
        assert!(out.trajectory.final_loss < 1e-6);
    }

    #[test]
    fn log_every_thins_records_but_keeps_last_step() {
        let objective = Quadratic::identity(2).unwrap();
        let mut opt = Sgd::new(0.1, 2).unwrap();
        let start = ParamVector::new(vec![1.0, 1.0]).unwrap();
        let out = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                iterations: 10,
                log_every: 4,
                ..DriveOptions::default()
            },
        )
        .unwrap();
        let steps: Vec<u64> = out.trajectory.records.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 4, 8, 9]);
    }

    #[test]
    fn mini_batching_requires_samples() {
        let objective = Rosenbrock::new();
        let mut opt = Sgd::new(0.1, 2).unwrap();
        let start = ParamVector::zeros(2).unwrap();
        let err = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                batch_size: Some(8),
                ..DriveOptions::default()
            },
        );
        assert!(err.is_err());
    }

    #[test]
    fn mini_batching_is_seeded_and_deterministic() {
        use crate::objectives::{LogisticRegression, SyntheticDataset};
        let run = |seed: u64| {
            let data = SyntheticDataset::blobs(50, 2, 1, 1.0).unwrap();
            let objective = LogisticRegression::new(data).unwrap();
            let mut opt = Sgd::new(0.1, 3).unwrap();
            let start = ParamVector::zeros(3).unwrap();
            drive(
                &mut opt,
                &objective,
                &start,
                &DriveOptions {
                    iterations: 40,
                    batch_size: Some(8),
                    seed,
                    ..DriveOptions::default()
                },
            )
            .unwrap()
            .trajectory
        };
        let a = run(5);
        let b = run(5);
        let c = run(6);
        assert_eq!(a, b);
        assert_ne!(a.records[1].loss, c.records[1].loss);
        // batch losses fluctuate sample to sample
        assert_ne!(a.records[0].loss, a.records[1].loss);
    }

    /// The drive loop must hand NAG the gradient at its look-ahead point,
    /// not at the current parameters. On f = 0.5||theta||^2 two hand-rolled
    /// steps pin the exact sequence down.
    #[test]
    fn nag_gradient_is_evaluated_at_the_lookahead_point() {
        use crate::optim::Nag;
        let objective = Quadratic::identity(1).unwrap();
        let (alpha, mu) = (0.1, 0.9);
        let mut opt = Nag::new(alpha, mu, 1).unwrap();
        let start = ParamVector::new(vec![1.0]).unwrap();
        let out = drive(
            &mut opt,
            &objective,
            &start,
            &DriveOptions {
                iterations: 2,
                log_params: true,
                ..DriveOptions::default()
            },
        )
        .unwrap();

        // step 1: v1 = alpha * theta0; theta1 = theta0 - v1
        let v1 = alpha * 1.0;
        let theta1 = 1.0 - v1;
        // step 2: gradient at theta1 - mu * v1
        let v2 = mu * v1 + alpha * (theta1 - mu * v1);
        let theta2 = theta1 - v2;
        let params = out.trajectory.params_sequence().unwrap();
        assert!((params[1][0] - theta1).abs() < 1e-15);
        assert!((params[2][0] - theta2).abs() < 1e-15);
    }

    #[test]
    fn identical_options_give_identical_trajectories() {
        let run = || {
            let objective = Quadratic::seeded(3, 10.0, 7).unwrap();
            let mut opt = DwmGrad::new(DwmGradConfig::default(), 3).unwrap();
            let start = ParamVector::new(vec![1.0, -1.0, 0.5]).unwrap();
            drive(
                &mut opt,
                &objective,
                &start,
                &DriveOptions {
                    iterations: 200,
                    log_params: true,
                    seed: 99,
                    ..DriveOptions::default()
                },
            )
            .unwrap()
            .trajectory
        };
        assert_eq!(run(), run());
    }
}
