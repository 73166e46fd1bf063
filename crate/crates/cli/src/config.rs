//! Experiment configuration files.
//!
//! Configs are TOML with a fixed schema; unknown keys are errors, so a typo
//! in a hyperparameter name fails the run instead of silently running the
//! default. Numbers are decimal doubles. `emit` followed by `parse` gives
//! back an equal config.

use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};

fn default_log_every() -> u64 {
    1
}

fn default_iterations() -> u64 {
    1000
}

/// The `[experiment]` block: budget, seed and logging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    #[serde(default = "default_iterations")]
    pub iterations: u64,
    #[serde(default)]
    pub seed: u64,
    /// Record raw parameters into every row (required by the parameter-level
    /// audits).
    #[serde(default)]
    pub log_params: bool,
    #[serde(default = "default_log_every")]
    pub log_every: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_point: Option<Vec<f64>>,
    /// Stop early once the loss falls below this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_loss: Option<f64>,
    /// Mini-batch size for dataset-backed objectives; full batch when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        Self {
            iterations: default_iterations(),
            seed: 0,
            log_params: false,
            log_every: 1,
            start_point: None,
            stop_loss: None,
            batch_size: None,
        }
    }
}

/// The `[objective]` block. Which fields apply depends on `name`; supplying
/// a field the named objective does not take is an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveBlock {
    /// One of: rosenbrock, quadratic, logistic, linreg, mlp.
    pub name: String,
    /// quadratic: problem dimension; dataset objectives: feature count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// quadratic only; eigenvalues span [1, condition_number].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_number: Option<f64>,
    /// Dataset objectives: sample count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// mlp only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_units: Option<usize>,
    /// Dataset objectives: class-mean offset along the first axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    /// Seed for data / matrix generation; defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
}

/// The `[optimizer]` block. Which fields apply depends on `name`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerBlock {
    /// One of: dwmgrad, sgd, msgd, nag, adagrad, rmsprop, adam, adamw.
    pub name: String,
    /// dwmgrad only: named hyperparameter preset (sets alpha0, omega_init,
    /// delta and a default batch size); explicit fields override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Base learning rate for every optimizer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_init: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// dwmgrad: "per-step-difference" (default) or "cumulative".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_mode: Option<String>,
    /// dwmgrad: "prose" (default) or "literal".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_moment_rule: Option<String>,
    /// msgd / nag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    /// rmsprop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// adam / adamw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    /// adamw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_decay: Option<f64>,
}

impl OptimizerBlock {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            preset: None,
            alpha0: None,
            omega_init: None,
            delta: None,
            gamma_init: None,
            epsilon: None,
            beta_mode: None,
            second_moment_rule: None,
            momentum: None,
            decay: None,
            beta1: None,
            beta2: None,
            weight_decay: None,
        }
    }

    pub fn with_alpha0(name: &str, alpha0: f64) -> Self {
        Self {
            alpha0: Some(alpha0),
            ..Self::named(name)
        }
    }
}

/// Config for `run`: one objective, one optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub experiment: ExperimentBlock,
    pub objective: ObjectiveBlock,
    pub optimizer: OptimizerBlock,
}

/// The `[compare]` block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    /// Loss threshold for the steps-to-threshold column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// Config for `compare`: shared experiment and objective, several
/// optimizers. Sharing one `[objective]` table is what guarantees every run
/// sees the same problem, start point and budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub compare: CompareBlock,
    #[serde(default)]
    pub experiment: ExperimentBlock,
    pub objective: ObjectiveBlock,
    #[serde(rename = "optimizer")]
    pub optimizers: Vec<OptimizerBlock>,
}

/// The `[sweep]` block: hyperparameter name -> list of values. Keys are
/// resolved against the optimizer field names; the Cartesian product runs in
/// key-sorted order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub grid: toml::value::Table,
}

/// Config for `sweep`: a base run plus a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub experiment: ExperimentBlock,
    pub objective: ObjectiveBlock,
    pub optimizer: OptimizerBlock,
    pub sweep: SweepBlock,
}

pub fn parse_run(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| HarnessError::Config(format!("bad run config: {e}")))
}

pub fn emit_run(config: &RunConfig) -> Result<String> {
    toml::to_string(config).map_err(|e| HarnessError::Config(format!("cannot emit config: {e}")))
}

pub fn parse_compare(text: &str) -> Result<CompareConfig> {
    toml::from_str(text).map_err(|e| HarnessError::Config(format!("bad compare config: {e}")))
}

pub fn parse_sweep(text: &str) -> Result<SweepConfig> {
    toml::from_str(text).map_err(|e| HarnessError::Config(format!("bad sweep config: {e}")))
}
