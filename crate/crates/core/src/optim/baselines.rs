//! Classical baseline optimizers behind the same stepping interface.
//!
//! Update rules follow the usual formulations: plain SGD, momentum SGD and
//! Nesterov's accelerated gradient (gradient taken at the look-ahead point),
//! AdaGrad and RMSprop (epsilon inside the square root), Adam (epsilon
//! outside the square root, bias-corrected moments), and AdamW (decoupled
//! weight decay applied to the parameters before the Adam update).

use crate::error::{Error, Result};
use crate::optim::{check_params_finite, validate_step_input, Optimizer, StepInput, StepStats};
use crate::vector::{inf_norm, ParamVector};

/// Baseline selector used by registries and test drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Sgd,
    Msgd,
    Nag,
    AdaGrad,
    RmsProp,
    Adam,
    AdamW,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 7] = [
        BaselineKind::Sgd,
        BaselineKind::Msgd,
        BaselineKind::Nag,
        BaselineKind::AdaGrad,
        BaselineKind::RmsProp,
        BaselineKind::Adam,
        BaselineKind::AdamW,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::Sgd => "sgd",
            BaselineKind::Msgd => "msgd",
            BaselineKind::Nag => "nag",
            BaselineKind::AdaGrad => "adagrad",
            BaselineKind::RmsProp => "rmsprop",
            BaselineKind::Adam => "adam",
            BaselineKind::AdamW => "adamw",
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "learning rate must be positive and finite, got {alpha}"
        )))
    }
}

fn check_dimension(dimension: usize) -> Result<()> {
    if dimension == 0 {
        Err(Error::InvalidConfig("dimension must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn check_unit_interval(value: f64, what: &str) -> Result<()> {
    if (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{what} must lie in [0, 1), got {value}"
        )))
    }
}

fn const_lr_stats(alpha: f64, momentum_norm: f64, update_norm: f64) -> StepStats {
    StepStats {
        omega: None,
        momentum_norm,
        lr_min: alpha,
        lr_mean: alpha,
        lr_max: alpha,
        update_norm,
        lr_ceiling: false,
    }
}

/// Plain stochastic gradient descent.
pub struct Sgd {
    alpha: f64,
    dimension: usize,
}

impl Sgd {
    pub fn new(alpha: f64, dimension: usize) -> Result<Self> {
        check_alpha(alpha)?;
        check_dimension(dimension)?;
        Ok(Self { alpha, dimension })
    }
}

impl Optimizer for Sgd {
    fn name(&self) -> &'static str {
        "sgd"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn base_rate(&self) -> f64 {
        self.alpha
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.dimension, params, &input)?;
        let mut update_norm = 0.0f64;
        for (p, g) in params.as_mut_slice().iter_mut().zip(input.gradient) {
            let d = self.alpha * g;
            *p -= d;
            update_norm = update_norm.max(d.abs());
        }
        check_params_finite(params, "sgd")?;
        Ok(const_lr_stats(self.alpha, 0.0, update_norm))
    }
}

/// Momentum SGD: `v = momentum * v + alpha * g; theta -= v`.
pub struct Msgd {
    alpha: f64,
    momentum: f64,
    velocity: Vec<f64>,
}

impl Msgd {
    pub fn new(alpha: f64, momentum: f64, dimension: usize) -> Result<Self> {
        check_alpha(alpha)?;
        check_unit_interval(momentum, "momentum")?;
        check_dimension(dimension)?;
        Ok(Self {
            alpha,
            momentum,
            velocity: vec![0.0; dimension],
        })
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }
}

impl Optimizer for Msgd {
    fn name(&self) -> &'static str {
        "msgd"
    }

    fn dimension(&self) -> usize {
        self.velocity.len()
    }

    fn base_rate(&self) -> f64 {
        self.alpha
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.velocity.len(), params, &input)?;
        for ((v, g), p) in self
            .velocity
            .iter_mut()
            .zip(input.gradient)
            .zip(params.as_mut_slice())
        {
            *v = self.momentum * *v + self.alpha * g;
            *p -= *v;
        }
        check_params_finite(params, "msgd")?;
        let vn = inf_norm(&self.velocity);
        Ok(const_lr_stats(self.alpha, vn, vn))
    }
}

/// Nesterov's accelerated gradient. The caller must evaluate the gradient at
/// [`Optimizer::lookahead_point`], i.e. `theta - momentum * v`.
pub struct Nag {
    alpha: f64,
    momentum: f64,
    velocity: Vec<f64>,
}

impl Nag {
    pub fn new(alpha: f64, momentum: f64, dimension: usize) -> Result<Self> {
        check_alpha(alpha)?;
        check_unit_interval(momentum, "momentum")?;
        check_dimension(dimension)?;
        Ok(Self {
            alpha,
            momentum,
            velocity: vec![0.0; dimension],
        })
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }
}

impl Optimizer for Nag {
    fn name(&self) -> &'static str {
        "nag"
    }

    fn dimension(&self) -> usize {
        self.velocity.len()
    }

    fn base_rate(&self) -> f64 {
        self.alpha
    }

    fn lookahead_point(&self, params: &ParamVector) -> ParamVector {
        let probe: Vec<f64> = params
            .iter()
            .zip(&self.velocity)
            .map(|(p, v)| p - self.momentum * v)
            .collect();
        // entries stay finite whenever params and velocity are
        ParamVector::new(probe).expect("look-ahead point from finite state")
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.velocity.len(), params, &input)?;
        for ((v, g), p) in self
            .velocity
            .iter_mut()
            .zip(input.gradient)
            .zip(params.as_mut_slice())
        {
            *v = self.momentum * *v + self.alpha * g;
            *p -= *v;
        }
        check_params_finite(params, "nag")?;
        let vn = inf_norm(&self.velocity);
        Ok(const_lr_stats(self.alpha, vn, vn))
    }
}

/// AdaGrad: accumulated squared gradients, epsilon inside the square root.
pub struct AdaGrad {
    alpha: f64,
    epsilon: f64,
    accum: Vec<f64>,
}

impl AdaGrad {
    pub fn new(alpha: f64, epsilon: f64, dimension: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be > 0".into()));
        }
        check_dimension(dimension)?;
        Ok(Self {
            alpha,
            epsilon,
            accum: vec![0.0; dimension],
        })
    }

    /// Accumulated squared gradients; non-decreasing elementwise.
    pub fn accumulator(&self) -> &[f64] {
        &self.accum
    }
}

impl Optimizer for AdaGrad {
    fn name(&self) -> &'static str {
        "adagrad"
    }

    fn dimension(&self) -> usize {
        self.accum.len()
    }

    fn base_rate(&self) -> f64 {
        self.alpha
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.accum.len(), params, &input)?;
        let mut lr_min = f64::INFINITY;
        let mut lr_max = 0.0f64;
        let mut lr_sum = 0.0;
        let mut update_norm = 0.0f64;
        for ((a, g), p) in self
            .accum
            .iter_mut()
            .zip(input.gradient)
            .zip(params.as_mut_slice())
        {
            *a += g * g;
            let lr = self.alpha / (*a + self.epsilon).sqrt();
            let d = lr * g;
            *p -= d;
            lr_min = lr_min.min(lr);
            lr_max = lr_max.max(lr);
            lr_sum += lr;
            update_norm = update_norm.max(d.abs());
        }
        check_params_finite(params, "adagrad")?;
        Ok(StepStats {
            omega: None,
            momentum_norm: 0.0,
            lr_min,
            lr_mean: lr_sum / self.accum.len() as f64,
            lr_max,
            update_norm,
            lr_ceiling: lr_max > 1e3 * self.alpha,
        })
    }
}

/// RMSprop: exponential moving average of squared gradients, epsilon inside
/// the square root.
pub struct RmsProp {
    alpha: f64,
    decay: f64,
    epsilon: f64,
    mean_sq: Vec<f64>,
}

impl RmsProp {
    pub fn new(alpha: f64, decay: f64, epsilon: f64, dimension: usize) -> Result<Self> {
        check_alpha(alpha)?;
        check_unit_interval(decay, "decay")?;
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be > 0".into()));
        }
        check_dimension(dimension)?;
        Ok(Self {
            alpha,
            decay,
            epsilon,
            mean_sq: vec![0.0; dimension],
        })
    }
}

impl Optimizer for RmsProp {
    fn name(&self) -> &'static str {
        "rmsprop"
    }

    fn dimension(&self) -> usize {
        self.mean_sq.len()
    }

    fn base_rate(&self) -> f64 {
        self.alpha
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.mean_sq.len(), params, &input)?;
        let mut lr_min = f64::INFINITY;
        let mut lr_max = 0.0f64;
        let mut lr_sum = 0.0;
        let mut update_norm = 0.0f64;
        for ((e, g), p) in self
            .mean_sq
            .iter_mut()
            .zip(input.gradient)
            .zip(params.as_mut_slice())
        {
            *e = self.decay * *e + (1.0 - self.decay) * g * g;
            let lr = self.alpha / (*e + self.epsilon).sqrt();
            let d = lr * g;
            *p -= d;
            lr_min = lr_min.min(lr);
            lr_max = lr_max.max(lr);
            lr_sum += lr;
            update_norm = update_norm.max(d.abs());
        }
        check_params_finite(params, "rmsprop")?;
        Ok(StepStats {
            omega: None,
            momentum_norm: 0.0,
            lr_min,
            lr_mean: lr_sum / self.mean_sq.len() as f64,
            lr_max,
            update_norm,
            lr_ceiling: lr_max > 1e3 * self.alpha,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_unit_interval(self.beta1, "beta1")?;
        check_unit_interval(self.beta2, "beta2")?;
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be > 0".into()));
        }
        Ok(())
    }
}

/// Adam with bias-corrected first and second moments.
pub struct Adam {
    config: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(config: AdamConfig, dimension: usize) -> Result<Self> {
        config.validate()?;
        check_dimension(dimension)?;
        Ok(Self {
            config,
            m: vec![0.0; dimension],
            v: vec![0.0; dimension],
            t: 0,
        })
    }

    /// Inner update shared with AdamW; assumes inputs already validated.
    fn apply(&mut self, params: &mut ParamVector, gradient: &[f64]) -> StepStats {
        self.t += 1;
        let c = &self.config;
        // strictly positive for every t >= 1 since beta < 1
        let bc1 = 1.0 - c.beta1.powi(self.t as i32);
        let bc2 = 1.0 - c.beta2.powi(self.t as i32);
        let mut lr_min = f64::INFINITY;
        let mut lr_max = 0.0f64;
        let mut lr_sum = 0.0;
        let mut update_norm = 0.0f64;
        for (((m, v), g), p) in self
            .m
            .iter_mut()
            .zip(self.v.iter_mut())
            .zip(gradient)
            .zip(params.as_mut_slice())
        {
            *m = c.beta1 * *m + (1.0 - c.beta1) * g;
            *v = c.beta2 * *v + (1.0 - c.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            let lr = c.alpha / (v_hat.sqrt() + c.epsilon);
            let d = lr * m_hat;
            *p -= d;
            lr_min = lr_min.min(lr);
            lr_max = lr_max.max(lr);
            lr_sum += lr;
            update_norm = update_norm.max(d.abs());
        }
        StepStats {
            omega: None,
            momentum_norm: inf_norm(&self.m),
            lr_min,
            lr_mean: lr_sum / self.m.len() as f64,
            lr_max,
            update_norm,
            lr_ceiling: lr_max > 1e3 * c.alpha,
        }
    }
}

impl Optimizer for Adam {
    fn name(&self) -> &'static str {
        "adam"
    }

    fn dimension(&self) -> usize {
        self.m.len()
    }

    fn base_rate(&self) -> f64 {
        self.config.alpha
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.m.len(), params, &input)?;
        let stats = self.apply(params, input.gradient);
        check_params_finite(params, "adam")?;
        Ok(stats)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamWConfig {
    pub adam: AdamConfig,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self {
            adam: AdamConfig::default(),
            weight_decay: 0.01,
        }
    }
}

/// AdamW: decoupled weight decay `theta *= 1 - alpha * weight_decay` applied
/// before the Adam update.
pub struct AdamW {
    inner: Adam,
    weight_decay: f64,
}

impl AdamW {
    pub fn new(config: AdamWConfig, dimension: usize) -> Result<Self> {
        if !(config.weight_decay >= 0.0 && config.weight_decay.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "weight_decay must be >= 0, got {}",
                config.weight_decay
            )));
        }
        Ok(Self {
            inner: Adam::new(config.adam, dimension)?,
            weight_decay: config.weight_decay,
        })
    }
}

impl Optimizer for AdamW {
    fn name(&self) -> &'static str {
        "adamw"
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn base_rate(&self) -> f64 {
        self.inner.config.alpha
    }

    fn step(&mut self, params: &mut ParamVector, input: StepInput<'_>) -> Result<StepStats> {
        validate_step_input(self.inner.m.len(), params, &input)?;
        let shrink = 1.0 - self.inner.config.alpha * self.weight_decay;
        let mut decay_norm = 0.0f64;
        for p in params.as_mut_slice() {
            decay_norm = decay_norm.max((*p * (1.0 - shrink)).abs());
            *p *= shrink;
        }
        let mut stats = self.inner.apply(params, input.gradient);
        check_params_finite(params, "adamw")?;
        stats.update_norm = stats.update_norm.max(decay_norm);
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_once(opt: &mut dyn Optimizer, params: Vec<f64>, gradient: &[f64]) -> Vec<f64> {
        let mut p = ParamVector::new(params).unwrap();
        opt.step(
            &mut p,
            StepInput {
                gradient,
                loss: 1.0,
            },
        )
        .unwrap();
        p.into_vec()
    }

    #[test]
    fn sgd_direct() {
        let mut opt = Sgd::new(0.1, 1).unwrap();
        let p = step_once(&mut opt, vec![1.0], &[2.0]);
        assert!((p[0] - 0.8).abs() < 1e-15);
    }

    /// First Adam step with g = 1: both corrected moments are exactly 1, so
    /// the displacement is alpha / (1 + epsilon).
    #[test]
    fn adam_first_step_bias_correction() {
        let cfg = AdamConfig {
            alpha: 0.1,
            ..AdamConfig::default()
        };
        let mut opt = Adam::new(cfg, 1).unwrap();
        let p = step_once(&mut opt, vec![0.0], &[1.0]);

        let m1 = (1.0 - 0.9) * 1.0;
        let v1 = (1.0 - 0.999) * 1.0;
        let m_hat = m1 / (1.0 - 0.9f64.powi(1));
        let v_hat = v1 / (1.0 - 0.999f64.powi(1));
        assert!((m_hat - 1.0).abs() < 1e-12);
        assert!((v_hat - 1.0).abs() < 1e-12);
        let expected = -0.1 / (v_hat.sqrt() + 1e-8) * m_hat;
        assert!((p[0] - expected).abs() < 1e-15);
        assert!((p[0] + 0.1).abs() < 1e-8);
    }

    #[test]
    fn adagrad_first_step_unit_normalization() {
        // G1 = g^2, so the displacement is alpha * g / sqrt(g^2 + eps) ~ sign(g)
        let mut opt = AdaGrad::new(1.0, 1e-12, 1).unwrap();
        let p = step_once(&mut opt, vec![0.0], &[1.0]);
        assert!((p[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn adagrad_accumulator_non_decreasing() {
        let mut opt = AdaGrad::new(0.1, 1e-8, 2).unwrap();
        let mut p = ParamVector::zeros(2).unwrap();
        let mut prev = opt.accumulator().to_vec();
        for g in [[1.0, -2.0], [0.0, 0.5], [3.0, 0.0], [-0.1, -0.1]] {
            opt.step(&mut p, StepInput { gradient: &g, loss: 0.0 }).unwrap();
            for (a, b) in opt.accumulator().iter().zip(&prev) {
                assert!(a >= b);
            }
            prev = opt.accumulator().to_vec();
        }
    }

    #[test]
    fn msgd_velocity_accumulates() {
        let mut opt = Msgd::new(0.1, 0.9, 1).unwrap();
        let p = step_once(&mut opt, vec![0.0], &[1.0]);
        assert!((p[0] + 0.1).abs() < 1e-15); // v1 = 0.1
        let mut pv = ParamVector::new(vec![p[0]]).unwrap();
        opt.step(&mut pv, StepInput { gradient: &[1.0], loss: 0.0 }).unwrap();
        // v2 = 0.9 * 0.1 + 0.1 = 0.19
        assert!((pv[0] - (-0.1 - 0.19)).abs() < 1e-15);
    }

    #[test]
    fn nag_lookahead_point() {
        let mut opt = Nag::new(0.1, 0.9, 1).unwrap();
        let mut p = ParamVector::new(vec![1.0]).unwrap();
        // fresh state: velocity 0, so the probe is the current point
        assert_eq!(opt.lookahead_point(&p).as_slice(), &[1.0]);
        opt.step(&mut p, StepInput { gradient: &[1.0], loss: 0.0 }).unwrap();
        // velocity now 0.1: probe = 0.9 - 0.9 * 0.1
        let probe = opt.lookahead_point(&p);
        assert!((probe[0] - (p[0] - 0.9 * 0.1)).abs() < 1e-15);
    }

    #[test]
    fn rmsprop_first_step() {
        let mut opt = RmsProp::new(0.1, 0.99, 1e-8, 1).unwrap();
        let p = step_once(&mut opt, vec![0.0], &[2.0]);
        // E1 = 0.01 * 4 = 0.04; step = 0.1 * 2 / sqrt(0.04 + 1e-8)
        let expected = 0.1 * 2.0 / (0.04f64 + 1e-8).sqrt();
        assert!((p[0] + expected).abs() < 1e-15);
    }

    #[test]
    fn adamw_decay_applied_before_update() {
        let cfg = AdamWConfig {
            adam: AdamConfig {
                alpha: 0.1,
                ..AdamConfig::default()
            },
            weight_decay: 0.5,
        };
        let mut opt = AdamW::new(cfg, 1).unwrap();
        let p = step_once(&mut opt, vec![2.0], &[1.0]);
        // decay shrinks 2.0 by (1 - 0.1*0.5) = 0.95, then the Adam step moves ~ -0.1
        let expected = 2.0 * 0.95 - 0.1 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn bias_correction_denominators_positive() {
        let cfg = AdamConfig::default();
        let mut opt = Adam::new(cfg, 1).unwrap();
        let mut p = ParamVector::zeros(1).unwrap();
        for _ in 0..500 {
            opt.step(&mut p, StepInput { gradient: &[0.1], loss: 0.0 }).unwrap();
            let t = opt.t;
            assert!(1.0 - 0.9f64.powi(t as i32) > 0.0);
            assert!(1.0 - 0.999f64.powi(t as i32) > 0.0);
        }
    }

    #[test]
    fn rejects_shape_mismatch() {
        let mut opt = Sgd::new(0.1, 2).unwrap();
        let mut p = ParamVector::zeros(2).unwrap();
        assert!(opt
            .step(&mut p, StepInput { gradient: &[1.0], loss: 0.0 })
            .is_err());
    }
}
