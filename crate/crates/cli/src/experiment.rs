//! Turns config blocks into live objectives and optimizers, validating that
//! every supplied field applies to the named thing (fail-closed).

use crate::config::{ExperimentBlock, ObjectiveBlock, OptimizerBlock};
use crate::error::{HarnessError, Result};
use crate::presets;
use dwmgrad::objectives::{
    LinearRegression, LogisticRegression, Objective, Quadratic, Rosenbrock, SyntheticDataset,
    TinyMlp,
};
use dwmgrad::optim::{
    AdaGrad, Adam, AdamConfig, AdamW, AdamWConfig, BetaMode, DwmGrad, DwmGradConfig, Msgd, Nag,
    Optimizer, RmsProp, SecondMomentRule, Sgd,
};
use dwmgrad::ParamVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reject_inapplicable(name: &str, fields: &[(&str, bool)]) -> Result<()> {
    for (field, present) in fields {
        if *present {
            return Err(HarnessError::Config(format!(
                "field '{field}' does not apply to '{name}'"
            )));
        }
    }
    Ok(())
}

pub fn build_objective(block: &ObjectiveBlock, experiment_seed: u64) -> Result<Box<dyn Objective>> {
    let data_seed = block.data_seed.unwrap_or(experiment_seed);
    let dataset = |block: &ObjectiveBlock| -> Result<SyntheticDataset> {
        let samples = block.samples.unwrap_or(200);
        let dimension = block.dimension.unwrap_or(2);
        let separation = block.separation.unwrap_or(1.0);
        Ok(SyntheticDataset::blobs(
            samples, dimension, data_seed, separation,
        )?)
    };

    match block.name.as_str() {
        "rosenbrock" => {
            reject_inapplicable(
                "rosenbrock",
                &[
                    ("dimension", block.dimension.is_some()),
                    ("condition_number", block.condition_number.is_some()),
                    ("samples", block.samples.is_some()),
                    ("hidden_units", block.hidden_units.is_some()),
                    ("separation", block.separation.is_some()),
                    ("data_seed", block.data_seed.is_some()),
                ],
            )?;
            Ok(Box::new(Rosenbrock::new()))
        }
        "quadratic" => {
            reject_inapplicable(
                "quadratic",
                &[
                    ("samples", block.samples.is_some()),
                    ("hidden_units", block.hidden_units.is_some()),
                    ("separation", block.separation.is_some()),
                ],
            )?;
            let dimension = block.dimension.ok_or_else(|| {
                HarnessError::Config("quadratic needs an explicit dimension".into())
            })?;
            let condition = block.condition_number.unwrap_or(10.0);
            Ok(Box::new(Quadratic::seeded(dimension, condition, data_seed)?))
        }
        "logistic" => {
            reject_inapplicable(
                "logistic",
                &[
                    ("condition_number", block.condition_number.is_some()),
                    ("hidden_units", block.hidden_units.is_some()),
                ],
            )?;
            Ok(Box::new(LogisticRegression::new(dataset(block)?)?))
        }
        "linreg" => {
            reject_inapplicable(
                "linreg",
                &[
                    ("condition_number", block.condition_number.is_some()),
                    ("hidden_units", block.hidden_units.is_some()),
                ],
            )?;
            Ok(Box::new(LinearRegression::new(dataset(block)?)?))
        }
        "mlp" => {
            reject_inapplicable(
                "mlp",
                &[("condition_number", block.condition_number.is_some())],
            )?;
            let hidden = block.hidden_units.unwrap_or(8);
            Ok(Box::new(TinyMlp::new(dataset(block)?, hidden)?))
        }
        other => Err(HarnessError::Config(format!(
            "unknown objective '{other}' (expected rosenbrock, quadratic, logistic, linreg or mlp)"
        ))),
    }
}

pub fn build_optimizer(block: &OptimizerBlock, dimension: usize) -> Result<Box<dyn Optimizer>> {
    let no_dwm_fields = [
        ("preset", block.preset.is_some()),
        ("omega_init", block.omega_init.is_some()),
        ("delta", block.delta.is_some()),
        ("gamma_init", block.gamma_init.is_some()),
        ("beta_mode", block.beta_mode.is_some()),
        ("second_moment_rule", block.second_moment_rule.is_some()),
    ];
    let momentum = ("momentum", block.momentum.is_some());
    let decay = ("decay", block.decay.is_some());
    let betas = [
        ("beta1", block.beta1.is_some()),
        ("beta2", block.beta2.is_some()),
    ];
    let weight_decay = ("weight_decay", block.weight_decay.is_some());
    let epsilon = ("epsilon", block.epsilon.is_some());

    match block.name.as_str() {
        "dwmgrad" => {
            reject_inapplicable(
                "dwmgrad",
                &[momentum, decay, betas[0], betas[1], weight_decay],
            )?;
            let mut config = DwmGradConfig::default();
            if let Some(preset_name) = &block.preset {
                let preset = presets::lookup(preset_name).ok_or_else(|| {
                    HarnessError::Config(format!(
                        "unknown preset '{preset_name}' (available: {})",
                        presets::names().join(", ")
                    ))
                })?;
                config.alpha0 = preset.alpha0;
                config.omega_init = preset.omega_init;
                config.delta = preset.delta;
            }
            if let Some(v) = block.alpha0 {
                config.alpha0 = v;
            }
            if let Some(v) = block.omega_init {
                config.omega_init = v;
            }
            if let Some(v) = block.delta {
                config.delta = v;
            }
            if let Some(v) = block.gamma_init {
                config.gamma_init = v;
            }
            if let Some(v) = block.epsilon {
                config.epsilon = v;
            }
            if let Some(mode) = &block.beta_mode {
                config.beta_mode = match mode.as_str() {
                    "per-step-difference" => BetaMode::PerStepDifference,
                    "cumulative" => BetaMode::Cumulative,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "beta_mode must be 'per-step-difference' or 'cumulative', got '{other}'"
                        )))
                    }
                };
            }
            if let Some(rule) = &block.second_moment_rule {
                config.second_moment_rule = match rule.as_str() {
                    "prose" => SecondMomentRule::Prose,
                    "literal" => SecondMomentRule::Literal,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "second_moment_rule must be 'prose' or 'literal', got '{other}'"
                        )))
                    }
                };
            }
            Ok(Box::new(DwmGrad::new(config, dimension)?))
        }
        "sgd" => {
            reject_inapplicable("sgd", &no_dwm_fields)?;
            reject_inapplicable("sgd", &[momentum, decay, betas[0], betas[1], weight_decay, epsilon])?;
            Ok(Box::new(Sgd::new(block.alpha0.unwrap_or(1e-3), dimension)?))
        }
        "msgd" => {
            reject_inapplicable("msgd", &no_dwm_fields)?;
            reject_inapplicable("msgd", &[decay, betas[0], betas[1], weight_decay, epsilon])?;
            Ok(Box::new(Msgd::new(
                block.alpha0.unwrap_or(1e-3),
                block.momentum.unwrap_or(0.9),
                dimension,
            )?))
        }
        "nag" => {
            reject_inapplicable("nag", &no_dwm_fields)?;
            reject_inapplicable("nag", &[decay, betas[0], betas[1], weight_decay, epsilon])?;
            Ok(Box::new(Nag::new(
                block.alpha0.unwrap_or(1e-3),
                block.momentum.unwrap_or(0.9),
                dimension,
            )?))
        }
        "adagrad" => {
            reject_inapplicable("adagrad", &no_dwm_fields)?;
            reject_inapplicable("adagrad", &[momentum, decay, betas[0], betas[1], weight_decay])?;
            Ok(Box::new(AdaGrad::new(
                block.alpha0.unwrap_or(1e-3),
                block.epsilon.unwrap_or(1e-8),
                dimension,
            )?))
        }
        "rmsprop" => {
            reject_inapplicable("rmsprop", &no_dwm_fields)?;
            reject_inapplicable("rmsprop", &[momentum, betas[0], betas[1], weight_decay])?;
            Ok(Box::new(RmsProp::new(
                block.alpha0.unwrap_or(1e-3),
                block.decay.unwrap_or(0.99),
                block.epsilon.unwrap_or(1e-8),
                dimension,
            )?))
        }
        "adam" => {
            reject_inapplicable("adam", &no_dwm_fields)?;
            reject_inapplicable("adam", &[momentum, decay, weight_decay])?;
            Ok(Box::new(Adam::new(adam_config(block), dimension)?))
        }
        "adamw" => {
            reject_inapplicable("adamw", &no_dwm_fields)?;
            reject_inapplicable("adamw", &[momentum, decay])?;
            Ok(Box::new(AdamW::new(
                AdamWConfig {
                    adam: adam_config(block),
                    weight_decay: block.weight_decay.unwrap_or(0.01),
                },
                dimension,
            )?))
        }
        other => Err(HarnessError::Config(format!(
            "unknown optimizer '{other}' (expected dwmgrad, sgd, msgd, nag, adagrad, rmsprop, adam or adamw)"
        ))),
    }
}

fn adam_config(block: &OptimizerBlock) -> AdamConfig {
    AdamConfig {
        alpha: block.alpha0.unwrap_or(1e-3),
        beta1: block.beta1.unwrap_or(0.9),
        beta2: block.beta2.unwrap_or(0.999),
        epsilon: block.epsilon.unwrap_or(1e-8),
    }
}

/// Start point for a run: the configured one when present, otherwise the
/// classical Rosenbrock start, the ones vector for the convex problems, or a
/// small seeded Gaussian for the network (whose all-zero point is a saddle).
pub fn start_point(
    block: &ObjectiveBlock,
    configured: Option<&Vec<f64>>,
    objective: &dyn Objective,
    seed: u64,
) -> Result<ParamVector> {
    if let Some(p) = configured {
        if p.len() != objective.dimension() {
            return Err(HarnessError::Config(format!(
                "start_point has length {}, objective '{}' needs {}",
                p.len(),
                objective.name(),
                objective.dimension()
            )));
        }
        return Ok(ParamVector::new(p.clone())?);
    }
    let d = objective.dimension();
    let params = match block.name.as_str() {
        "rosenbrock" => Rosenbrock::default_start().to_vec(),
        "mlp" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6c70);
            (0..d).map(|_| 0.1 * rng.gen_range(-1.0..1.0)).collect()
        }
        _ => vec![1.0; d],
    };
    Ok(ParamVector::new(params)?)
}

/// Iteration, logging and batching knobs for the core run loop.
pub fn drive_options(experiment: &ExperimentBlock) -> dwmgrad::runner::DriveOptions {
    dwmgrad::runner::DriveOptions {
        iterations: experiment.iterations,
        log_every: experiment.log_every,
        log_params: experiment.log_params,
        stop_loss: experiment.stop_loss,
        batch_size: experiment.batch_size,
        seed: experiment.seed,
    }
}
