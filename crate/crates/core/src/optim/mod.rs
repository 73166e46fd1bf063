//! Optimizers behind one uniform stepping interface.
//!
//! The window-controlled optimizer lives in [`dwmgrad`]; the classical
//! baselines (SGD, momentum SGD, NAG, AdaGrad, RMSprop, Adam, AdamW) live in
//! [`baselines`]. All of them mutate a [`ParamVector`] in place given the
//! gradient at the evaluation point and the current loss, and report the
//! per-step statistics the trajectory logger records.

pub mod baselines;
pub mod dwmgrad;

use crate::error::Result;
use crate::vector::ParamVector;

/// Per-step input: the gradient evaluated at [`Optimizer::lookahead_point`]
/// and the objective value at the current parameters. The loss drives the
/// window controller of DWMGrad and is ignored by the baselines.
#[derive(Debug, Clone, Copy)]
pub struct StepInput<'a> {
    pub gradient: &'a [f64],
    pub loss: f64,
}

/// Statistics describing one completed step, consumed by the trajectory
/// logger and the audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    /// Window size after this step's adjustment. `None` for baselines.
    pub omega: Option<u32>,
    /// Infinity norm of the momentum / velocity vector after the step.
    /// Zero for optimizers that keep no momentum.
    pub momentum_norm: f64,
    /// Smallest effective per-parameter step size this step.
    pub lr_min: f64,
    /// Mean effective per-parameter step size this step.
    pub lr_mean: f64,
    /// Largest effective per-parameter step size this step.
    pub lr_max: f64,
    /// Infinity norm of the gradient-driven update term. For DWMGrad this is
    /// max_i |alpha_i * g_i|, the quantity the momentum bound audit needs;
    /// for baselines it is the infinity norm of the parameter displacement.
    pub update_norm: f64,
    /// True when some effective step size exceeded 1e3 times the base rate.
    pub lr_ceiling: bool,
}

/// Uniform stepping interface over DWMGrad and the baselines.
///
/// States are single-owner: a value is mutated only through `step` and may be
/// moved between threads between steps (`Send`). Determinism is per state:
/// the same sequence of inputs yields bit-identical parameter sequences.
pub trait Optimizer: Send {
    fn name(&self) -> &'static str;

    /// Dimension the optimizer was initialized for.
    fn dimension(&self) -> usize;

    /// Base learning rate (the `alpha` the ceiling flag is measured against).
    fn base_rate(&self) -> f64;

    /// Maximum window for the windowed optimizer; `None` for baselines.
    fn window_limit(&self) -> Option<u32> {
        None
    }

    /// Initial momentum fill value, when the optimizer has one.
    fn initial_momentum_fill(&self) -> Option<f64> {
        None
    }

    /// The point at which the caller must evaluate the gradient before
    /// calling [`step`](Self::step). Identical to `params` for every
    /// optimizer except NAG, which probes `theta - momentum * velocity`.
    fn lookahead_point(&self, params: &ParamVector) -> ParamVector {
        params.clone()
    }

    /// Apply one update in place.
    ///
    /// A non-finite loss or gradient (or a shape mismatch) rejects the step
    /// and leaves both the state and `params` untouched. A step that drives
    /// some parameter non-finite reports [`crate::Error::NonFiniteResult`];
    /// the state is then no longer usable and the run must abort.
    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats>;
}

pub use baselines::{
    AdaGrad, Adam, AdamConfig, AdamW, AdamWConfig, BaselineKind, Msgd, Nag, RmsProp, Sgd,
};
pub use dwmgrad::{
    adaptive_lr, momentum_update, update_second_moment, window_update, BetaMode, DwmGrad,
    DwmGradConfig, DwmGradState, SecondMomentRule,
};

pub(crate) fn validate_step_input(
    dimension: usize,
    params: &ParamVector,
    input: &StepInput<'_>,
) -> Result<()> {
    crate::vector::check_same_len(dimension, params.len())?;
    crate::vector::check_same_len(dimension, input.gradient.len())?;
    if !input.loss.is_finite() {
        return Err(crate::Error::NonFiniteInput(format!(
            "loss is {}",
            input.loss
        )));
    }
    crate::vector::check_all_finite(input.gradient, "gradient")
}

pub(crate) fn check_params_finite(params: &ParamVector, optimizer: &str) -> Result<()> {
    if params.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(crate::Error::NonFiniteResult(format!(
            "{optimizer} step produced non-finite parameters; the run has diverged"
        )))
    }
}
