//! Dynamic window-controlled momentum with adaptive per-parameter step sizes.
//!
//! The optimizer keeps an integer window `omega` in `[1, delta]` that a
//! loss-difference signal `beta` grows on improvement and shrinks otherwise.
//! The window weighs a running second-moment statistic of the gradient,
//! which in turn normalizes a per-parameter step size
//! `alpha0 / (sqrt(v) + epsilon)`; the ratio `omega / delta` is the decay
//! factor of the momentum vector that the parameters actually move by:
//!
//! ```text
//! beta   <- loss signal                      (per BetaMode)
//! omega  <- min(omega+1, delta)  if beta > 0, else max(omega-1, 1)
//! v      <- (v * omega_prev + g^2) / omega   (prose rule, v0 = 0)
//! alpha  <- alpha0 / (sqrt(v) + epsilon)     (elementwise)
//! gamma  <- (omega / delta) * gamma + alpha .* g
//! theta  <- theta - gamma
//! ```

use crate::error::{Error, Result};
use crate::optim::{check_params_finite, validate_step_input, Optimizer, StepInput, StepStats};
use crate::vector::{check_same_len, inf_norm, ParamVector};

/// How the loss signal `beta` that drives the window is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMode {
    /// `beta` is set each step to `prev_loss - loss`: positive when the loss
    /// improved, so improvement widens the window. Default.
    PerStepDifference,
    /// `beta` accumulates the per-step differences and is never reset.
    Cumulative,
}

/// Which reading of the second-moment recurrence is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondMomentRule {
    /// `v = (v * omega_prev + g^2) / omega`, elementwise, `v0 = 0`. Keeps `v`
    /// non-negative and is the default.
    Prose,
    /// `v = (g_prev * omega_prev + g_prev^2) / omega`, a symbol-for-symbol
    /// transcription that mixes the previous raw gradient with its square.
    /// Entries can go negative and are clamped at zero before the square
    /// root when the step size is formed. Kept for fidelity experiments.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwmGradConfig {
    /// Base learning rate, > 0.
    pub alpha0: f64,
    /// Initial window, >= 1.
    pub omega_init: u32,
    /// Maximum window, >= omega_init.
    pub delta: u32,
    /// Initial momentum fill value. Zero leaves the momentum vector at the
    /// origin; any other value fills every entry with it.
    pub gamma_init: f64,
    /// Numerical floor added to the square root, > 0.
    pub epsilon: f64,
    pub beta_mode: BetaMode,
    pub second_moment_rule: SecondMomentRule,
}

impl Default for DwmGradConfig {
    fn default() -> Self {
        Self {
            alpha0: 1e-3,
            omega_init: 5,
            delta: 10,
            gamma_init: 0.0,
            epsilon: 1e-8,
            beta_mode: BetaMode::PerStepDifference,
            second_moment_rule: SecondMomentRule::Prose,
        }
    }
}

impl DwmGradConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha0 must be positive and finite, got {}",
                self.alpha0
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if self.omega_init < 1 {
            return Err(Error::InvalidConfig("omega_init must be >= 1".into()));
        }
        if self.delta < self.omega_init {
            return Err(Error::InvalidConfig(format!(
                "delta ({}) must be >= omega_init ({})",
                self.delta, self.omega_init
            )));
        }
        if !self.gamma_init.is_finite() {
            return Err(Error::InvalidConfig("gamma_init must be finite".into()));
        }
        Ok(())
    }
}

/// Full mutable optimizer state. `omega` stays in `[1, delta]`, the second
/// moment stays elementwise non-negative under the prose rule, and
/// `step_count` increases by exactly one per successful step.
#[derive(Debug, Clone, PartialEq)]
pub struct DwmGradState {
    pub omega: u32,
    pub beta: f64,
    pub momentum: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub prev_loss: Option<f64>,
    /// Previous raw gradient, maintained only under the literal rule.
    pub prev_gradient: Option<Vec<f64>>,
    pub step_count: u64,
}

impl DwmGradState {
    fn new(config: &DwmGradConfig, dimension: usize) -> Self {
        Self {
            omega: config.omega_init,
            beta: 0.0,
            momentum: vec![config.gamma_init; dimension],
            second_moment: vec![0.0; dimension],
            prev_loss: None,
            prev_gradient: match config.second_moment_rule {
                SecondMomentRule::Prose => None,
                SecondMomentRule::Literal => Some(vec![0.0; dimension]),
            },
            step_count: 0,
        }
    }
}

/// Adjust the window from the loss signal: grow by one on improvement
/// (`beta > 0`), shrink by one otherwise, clamped to `[1, delta]`.
pub fn window_update(omega: u32, beta: f64, delta: u32) -> Result<u32> {
    if delta < 1 {
        return Err(Error::InvalidConfig(format!(
            "delta must be >= 1, got {delta}"
        )));
    }
    if omega < 1 || omega > delta {
        return Err(Error::InvalidConfig(format!(
            "omega ({omega}) outside [1, {delta}]"
        )));
    }
    Ok(if beta > 0.0 {
        (omega + 1).min(delta)
    } else {
        (omega - 1).max(1)
    })
}

/// Update the second-moment accumulator in place.
///
/// `prev_gradient` is consulted only under the literal rule, where it stands
/// in for the previous step's raw gradient (zeros before the first step).
pub fn update_second_moment(
    second_moment: &mut [f64],
    gradient: &[f64],
    prev_gradient: Option<&[f64]>,
    omega_prev: u32,
    omega_new: u32,
    rule: SecondMomentRule,
) -> Result<()> {
    if omega_new == 0 {
        // window_update's postcondition makes this unreachable
        return Err(Error::Internal("second-moment update with omega = 0".into()));
    }
    let wp = omega_prev as f64;
    let wn = omega_new as f64;
    match rule {
        SecondMomentRule::Prose => {
            check_same_len(second_moment.len(), gradient.len())?;
            for (v, g) in second_moment.iter_mut().zip(gradient) {
                *v = (*v * wp + g * g) / wn;
            }
        }
        SecondMomentRule::Literal => {
            let pg = prev_gradient.ok_or_else(|| {
                Error::Internal("literal second-moment rule needs the previous gradient".into())
            })?;
            check_same_len(second_moment.len(), pg.len())?;
            for (v, g) in second_moment.iter_mut().zip(pg) {
                *v = (g * wp + g * g) / wn;
            }
        }
    }
    Ok(())
}

/// Per-parameter step size `alpha0 / (sqrt(v) + epsilon)`, written into `lr`.
///
/// Negative accumulator entries (possible only under the literal rule) clamp
/// to zero before the square root, so every output lies in
/// `(0, alpha0 / epsilon]`.
pub fn adaptive_lr(lr: &mut [f64], second_moment: &[f64], alpha0: f64, epsilon: f64) {
    debug_assert_eq!(lr.len(), second_moment.len());
    for (a, v) in lr.iter_mut().zip(second_moment) {
        *a = alpha0 / (v.max(0.0).sqrt() + epsilon);
    }
}

/// Momentum recurrence `gamma = (omega / delta) * gamma + lr .* gradient`,
/// in place.
pub fn momentum_update(momentum: &mut [f64], omega: u32, delta: u32, lr: &[f64], gradient: &[f64]) {
    debug_assert_eq!(momentum.len(), lr.len());
    debug_assert_eq!(momentum.len(), gradient.len());
    let decay = omega as f64 / delta as f64;
    for ((m, a), g) in momentum.iter_mut().zip(lr).zip(gradient) {
        *m = decay * *m + a * g;
    }
}

/// The window-controlled momentum optimizer.
pub struct DwmGrad {
    config: DwmGradConfig,
    state: DwmGradState,
    dimension: usize,
    lr_buf: Vec<f64>,
}

impl DwmGrad {
    pub fn new(config: DwmGradConfig, dimension: usize) -> Result<Self> {
        config.validate()?;
        if dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be >= 1".into()));
        }
        Ok(Self {
            state: DwmGradState::new(&config, dimension),
            config,
            dimension,
            lr_buf: vec![0.0; dimension],
        })
    }

    pub fn config(&self) -> &DwmGradConfig {
        &self.config
    }

    pub fn state(&self) -> &DwmGradState {
        &self.state
    }

    /// Replace the state wholesale. Used by tests that need to start from an
    /// arbitrary mid-run state; shapes must match the initialized dimension.
    pub fn set_state(&mut self, state: DwmGradState) -> Result<()> {
        check_same_len(self.dimension, state.momentum.len())?;
        check_same_len(self.dimension, state.second_moment.len())?;
        if state.omega < 1 || state.omega > self.config.delta {
            return Err(Error::InvalidConfig(format!(
                "state omega ({}) outside [1, {}]",
                state.omega, self.config.delta
            )));
        }
        self.state = state;
        Ok(())
    }
}

impl Optimizer for DwmGrad {
    fn name(&self) -> &'static str {
        "dwmgrad"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn base_rate(&self) -> f64 {
        self.config.alpha0
    }

    fn window_limit(&self) -> Option<u32> {
        Some(self.config.delta)
    }

    fn initial_momentum_fill(&self) -> Option<f64> {
        Some(self.config.gamma_init)
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.dimension, params, &input)?;

        let st = &mut self.state;

        // Loss signal first, then the window, matching the update order of
        // the remaining statistics below.
        match self.config.beta_mode {
            BetaMode::PerStepDifference => {
                if let Some(prev) = st.prev_loss {
                    st.beta = prev - input.loss;
                }
                // no previous loss: beta keeps its initial 0 and the
                // shrink branch fires on the first step
            }
            BetaMode::Cumulative => {
                if let Some(prev) = st.prev_loss {
                    st.beta += prev - input.loss;
                }
            }
        }
        let omega_prev = st.omega;
        st.omega = window_update(st.omega, st.beta, self.config.delta)?;

        update_second_moment(
            &mut st.second_moment,
            input.gradient,
            st.prev_gradient.as_deref(),
            omega_prev,
            st.omega,
            self.config.second_moment_rule,
        )?;

        adaptive_lr(
            &mut self.lr_buf,
            &st.second_moment,
            self.config.alpha0,
            self.config.epsilon,
        );

        momentum_update(
            &mut st.momentum,
            st.omega,
            self.config.delta,
            &self.lr_buf,
            input.gradient,
        );

        let mut lr_min = f64::INFINITY;
        let mut lr_max = 0.0f64;
        let mut lr_sum = 0.0;
        let mut update_norm = 0.0f64;
        for (a, g) in self.lr_buf.iter().zip(input.gradient) {
            lr_min = lr_min.min(*a);
            lr_max = lr_max.max(*a);
            lr_sum += a;
            update_norm = update_norm.max((a * g).abs());
        }

        for (p, m) in params.as_mut_slice().iter_mut().zip(&st.momentum) {
            *p -= m;
        }

        if let Some(pg) = st.prev_gradient.as_mut() {
            pg.copy_from_slice(input.gradient);
        }
        st.prev_loss = Some(input.loss);
        st.step_count += 1;

        check_params_finite(params, "dwmgrad")?;

        Ok(StepStats {
            omega: Some(st.omega),
            momentum_norm: inf_norm(&st.momentum),
            lr_min,
            lr_mean: lr_sum / self.dimension as f64,
            lr_max,
            update_norm,
            lr_ceiling: lr_max > 1e3 * self.config.alpha0,
        })
    }
}
