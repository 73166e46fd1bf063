//! The `check` command: a self-contained verification suite that re-derives
//! every optimizer step from independent scalar reference implementations
//! and exercises the library's invariants. Groups report pass/fail
//! individually; any failure makes the command exit nonzero.
//!
//! The references here are deliberately plain per-coordinate arithmetic with
//! no shared code with the library's vectorized optimizers.

use dwmgrad::diagnostics::momentum_bound_audit;
use dwmgrad::objectives::{
    gradient_check, LinearRegression, LogisticRegression, Objective, Quadratic, Rosenbrock,
    SyntheticDataset, TinyMlp,
};
use dwmgrad::optim::{
    window_update, AdaGrad, Adam, AdamConfig, AdamW, AdamWConfig, BaselineKind, BetaMode, DwmGrad,
    DwmGradConfig, Msgd, Nag, Optimizer, RmsProp, SecondMomentRule, Sgd, StepInput,
};
use dwmgrad::runner::{drive, DriveOptions};
use dwmgrad::ParamVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CheckOutcome {
    pub group: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Run every group. Deterministic: two invocations produce the same
/// pass/fail matrix.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        oracle_equivalence(),
        window_confinement(),
        second_moment_and_step_band(),
        momentum_bound_on_runs(),
        gradient_checks(),
    ]
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

const ORACLE_INSTANCES: usize = 1000;
const ORACLE_TOLERANCE: f64 = 1e-12;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// scalar reference steps

struct DwmRef {
    alpha0: f64,
    delta: u32,
    epsilon: f64,
    cumulative: bool,
    literal: bool,
    omega: u32,
    beta: f64,
    prev_loss: Option<f64>,
    v: Vec<f64>,
    gamma: Vec<f64>,
    prev_g: Vec<f64>,
}

impl DwmRef {
    fn step(&mut self, theta: &mut [f64], g: &[f64], loss: f64) {
        if let Some(prev) = self.prev_loss {
            if self.cumulative {
                self.beta += prev - loss;
            } else {
                self.beta = prev - loss;
            }
        }
        let omega_prev = self.omega as f64;
        self.omega = if self.beta > 0.0 {
            (self.omega + 1).min(self.delta)
        } else {
            (self.omega - 1).max(1)
        };
        let omega_new = self.omega as f64;
        for i in 0..theta.len() {
            self.v[i] = if self.literal {
                (self.prev_g[i] * omega_prev + self.prev_g[i] * self.prev_g[i]) / omega_new
            } else {
                (self.v[i] * omega_prev + g[i] * g[i]) / omega_new
            };
            let alpha = self.alpha0 / (self.v[i].max(0.0).sqrt() + self.epsilon);
            self.gamma[i] = (omega_new / self.delta as f64) * self.gamma[i] + alpha * g[i];
            theta[i] -= self.gamma[i];
        }
        self.prev_g.copy_from_slice(g);
        self.prev_loss = Some(loss);
    }
}

struct BaselineRef {
    kind: BaselineKind,
    alpha: f64,
    momentum: f64,
    decay: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    weight_decay: f64,
    velocity: Vec<f64>,
    accum: Vec<f64>,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl BaselineRef {
    fn new(kind: BaselineKind, d: usize, rng: &mut ChaCha8Rng) -> Self {
        Self {
            kind,
            alpha: rng.gen_range(1e-4..0.2),
            momentum: rng.gen_range(0.0..0.99),
            decay: rng.gen_range(0.5..0.999),
            beta1: rng.gen_range(0.5..0.99),
            beta2: rng.gen_range(0.9..0.9999),
            epsilon: 1e-8,
            weight_decay: rng.gen_range(0.0..0.1),
            velocity: vec![0.0; d],
            accum: vec![0.0; d],
            m: vec![0.0; d],
            v: vec![0.0; d],
            t: 0,
        }
    }

    fn build(&self, d: usize) -> Box<dyn Optimizer> {
        match self.kind {
            BaselineKind::Sgd => Box::new(Sgd::new(self.alpha, d).unwrap()),
            BaselineKind::Msgd => Box::new(Msgd::new(self.alpha, self.momentum, d).unwrap()),
            BaselineKind::Nag => Box::new(Nag::new(self.alpha, self.momentum, d).unwrap()),
            BaselineKind::AdaGrad => Box::new(AdaGrad::new(self.alpha, self.epsilon, d).unwrap()),
            BaselineKind::RmsProp => {
                Box::new(RmsProp::new(self.alpha, self.decay, self.epsilon, d).unwrap())
            }
            BaselineKind::Adam => Box::new(
                Adam::new(
                    AdamConfig {
                        alpha: self.alpha,
                        beta1: self.beta1,
                        beta2: self.beta2,
                        epsilon: self.epsilon,
                    },
                    d,
                )
                .unwrap(),
            ),
            BaselineKind::AdamW => Box::new(
                AdamW::new(
                    AdamWConfig {
                        adam: AdamConfig {
                            alpha: self.alpha,
                            beta1: self.beta1,
                            beta2: self.beta2,
                            epsilon: self.epsilon,
                        },
                        weight_decay: self.weight_decay,
                    },
                    d,
                )
                .unwrap(),
            ),
        }
    }

    fn step(&mut self, theta: &mut [f64], g: &[f64]) {
        match self.kind {
            BaselineKind::Sgd => {
                for i in 0..theta.len() {
                    theta[i] -= self.alpha * g[i];
                }
            }
            BaselineKind::Msgd | BaselineKind::Nag => {
                for i in 0..theta.len() {
                    self.velocity[i] = self.momentum * self.velocity[i] + self.alpha * g[i];
                    theta[i] -= self.velocity[i];
                }
            }
            BaselineKind::AdaGrad => {
                for i in 0..theta.len() {
                    self.accum[i] += g[i] * g[i];
                    theta[i] -= self.alpha / (self.accum[i] + self.epsilon).sqrt() * g[i];
                }
            }
            BaselineKind::RmsProp => {
                for i in 0..theta.len() {
                    self.accum[i] = self.decay * self.accum[i] + (1.0 - self.decay) * g[i] * g[i];
                    theta[i] -= self.alpha / (self.accum[i] + self.epsilon).sqrt() * g[i];
                }
            }
            BaselineKind::Adam => {
                self.t += 1;
                self.adam_update(theta, g);
            }
            BaselineKind::AdamW => {
                self.t += 1;
                for x in theta.iter_mut() {
                    *x *= 1.0 - self.alpha * self.weight_decay;
                }
                self.adam_update(theta, g);
            }
        }
    }

    fn adam_update(&mut self, theta: &mut [f64], g: &[f64]) {
        for i in 0..theta.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g[i] * g[i];
            let mh = self.m[i] / (1.0 - self.beta1.powi(self.t as i32));
            let vh = self.v[i] / (1.0 - self.beta2.powi(self.t as i32));
            theta[i] -= self.alpha * mh / (vh.sqrt() + self.epsilon);
        }
    }
}

// ---------------------------------------------------------------------------
// groups

pub fn oracle_equivalence() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0f6ac1e);
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;

    // windowed optimizer against its scalar reference
    for _ in 0..ORACLE_INSTANCES {
        let d = rng.gen_range(1..=5usize);
        let steps = rng.gen_range(1..=5usize);
        let delta = rng.gen_range(2..=12u32);
        let config = DwmGradConfig {
            alpha0: rng.gen_range(1e-4..0.1),
            omega_init: rng.gen_range(1..=delta),
            delta,
            gamma_init: [0.0, 0.9, -0.3][rng.gen_range(0..3usize)],
            epsilon: [1e-8, 1e-6][rng.gen_range(0..2usize)],
            beta_mode: if rng.gen() {
                BetaMode::PerStepDifference
            } else {
                BetaMode::Cumulative
            },
            second_moment_rule: if rng.gen() {
                SecondMomentRule::Prose
            } else {
                SecondMomentRule::Literal
            },
        };
        let mut reference = DwmRef {
            alpha0: config.alpha0,
            delta: config.delta,
            epsilon: config.epsilon,
            cumulative: config.beta_mode == BetaMode::Cumulative,
            literal: config.second_moment_rule == SecondMomentRule::Literal,
            omega: config.omega_init,
            beta: 0.0,
            prev_loss: None,
            v: vec![0.0; d],
            gamma: vec![config.gamma_init; d],
            prev_g: vec![0.0; d],
        };
        let mut optimizer = DwmGrad::new(config, d).unwrap();

        let start: Vec<f64> = (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut impl_theta = ParamVector::new(start.clone()).unwrap();
        let mut ref_theta = start;
        for _ in 0..steps {
            let g: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let loss = rng.gen_range(0.0..10.0);
            optimizer
                .step(&mut impl_theta, StepInput { gradient: &g, loss })
                .unwrap();
            reference.step(&mut ref_theta, &g, loss);
            for (a, b) in impl_theta.iter().zip(&ref_theta) {
                let e = rel_err(*a, *b);
                worst = worst.max(e);
                if e > ORACLE_TOLERANCE {
                    failures += 1;
                }
            }
        }
    }

    // the seven baselines against theirs
    for kind in BaselineKind::ALL {
        for _ in 0..ORACLE_INSTANCES {
            let d = rng.gen_range(1..=5usize);
            let steps = rng.gen_range(1..=5usize);
            let mut reference = BaselineRef::new(kind, d, &mut rng);
            let mut optimizer = reference.build(d);

            let start: Vec<f64> = (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mut impl_theta = ParamVector::new(start.clone()).unwrap();
            let mut ref_theta = start;
            for _ in 0..steps {
                let g: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();

                // the look-ahead probe is part of the contract for NAG
                if kind == BaselineKind::Nag {
                    let probe = optimizer.lookahead_point(&impl_theta);
                    for i in 0..d {
                        let expected = impl_theta[i] - reference.momentum * reference.velocity[i];
                        let e = rel_err(probe[i], expected);
                        worst = worst.max(e);
                        if e > ORACLE_TOLERANCE {
                            failures += 1;
                        }
                    }
                }

                optimizer
                    .step(&mut impl_theta, StepInput { gradient: &g, loss: 0.0 })
                    .unwrap();
                reference.step(&mut ref_theta, &g);
                for (a, b) in impl_theta.iter().zip(&ref_theta) {
                    let e = rel_err(*a, *b);
                    worst = worst.max(e);
                    if e > ORACLE_TOLERANCE {
                        failures += 1;
                    }
                }
            }
        }
    }

    CheckOutcome {
        group: "oracle-equivalence",
        passed: failures == 0,
        detail: format!(
            "{} instances per optimizer, worst relative error {:.2e} (tolerance {:.0e}), {} failures",
            ORACLE_INSTANCES, worst, ORACLE_TOLERANCE, failures
        ),
    }
}

pub fn window_confinement() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x71d0);
    let mut violations = 0usize;
    let sequences = 100_000;
    let length = 10;
    for _ in 0..sequences {
        let delta = rng.gen_range(1..=15u32);
        let mut omega = rng.gen_range(1..=delta);
        for _ in 0..length {
            let beta = rng.gen_range(-1.0..1.0);
            match window_update(omega, beta, delta) {
                Ok(next) => {
                    if !(1..=delta).contains(&next) {
                        violations += 1;
                    }
                    omega = next;
                }
                Err(_) => violations += 1,
            }
        }
    }
    CheckOutcome {
        group: "window-confinement",
        passed: violations == 0,
        detail: format!(
            "{} updates over {sequences} random beta sequences, {violations} out-of-range results",
            sequences * length
        ),
    }
}

pub fn second_moment_and_step_band() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbad5eed);
    let mut violations = 0usize;
    let runs = 200;
    for _ in 0..runs {
        let d = rng.gen_range(1..=6usize);
        let config = DwmGradConfig {
            alpha0: rng.gen_range(1e-4..0.1),
            ..DwmGradConfig::default()
        };
        let ceiling = config.alpha0 / config.epsilon;
        let mut optimizer = DwmGrad::new(config, d).unwrap();
        let mut params = ParamVector::zeros(d).unwrap();
        for _ in 0..50 {
            let g: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let loss = rng.gen_range(0.0..5.0);
            let stats = optimizer
                .step(&mut params, StepInput { gradient: &g, loss })
                .unwrap();
            if optimizer.state().second_moment.iter().any(|v| *v < 0.0) {
                violations += 1;
            }
            if !(stats.lr_min > 0.0 && stats.lr_max <= ceiling * (1.0 + 1e-12)) {
                violations += 1;
            }
        }
    }
    CheckOutcome {
        group: "second-moment-and-step-band",
        passed: violations == 0,
        detail: format!(
            "{runs} runs x 50 steps under the prose rule, {violations} violations of v >= 0 or alpha in (0, alpha0/eps]"
        ),
    }
}

pub fn momentum_bound_on_runs() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a3);
    let mut violations = 0usize;
    let mut audited = 0usize;
    let runs = 100;
    for run in 0..runs {
        let d = rng.gen_range(2..=6usize);
        let objective = Quadratic::seeded(d, rng.gen_range(1.0..50.0), run as u64).unwrap();
        let config = DwmGradConfig {
            alpha0: rng.gen_range(1e-3..0.1),
            ..DwmGradConfig::default()
        };
        let mut optimizer = DwmGrad::new(config, d).unwrap();
        let start: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let start = ParamVector::new(start).unwrap();
        let out = drive(
            &mut optimizer,
            &objective,
            &start,
            &DriveOptions {
                iterations: 50,
                ..DriveOptions::default()
            },
        )
        .unwrap();
        let report = momentum_bound_audit(&out.trajectory).unwrap();
        audited += report.steps;
        violations += report.violations;
    }
    CheckOutcome {
        group: "momentum-bound",
        passed: violations == 0,
        detail: format!("{audited} steps over {runs} recorded runs, {violations} violations"),
    }
}

pub fn gradient_checks() -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6ead);
    let data = SyntheticDataset::blobs(40, 3, 13, 1.0).unwrap();
    let objectives: Vec<Box<dyn Objective>> = vec![
        Box::new(Rosenbrock::new()),
        Box::new(Quadratic::seeded(5, 10.0, 13).unwrap()),
        Box::new(LogisticRegression::new(data.clone()).unwrap()),
        Box::new(LinearRegression::new(data.clone()).unwrap()),
        Box::new(TinyMlp::new(data, 4).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    let mut detail = String::new();
    for objective in &objectives {
        let mut obj_worst: f64 = 0.0;
        for _ in 0..50 {
            let p: Vec<f64> = (0..objective.dimension())
                .map(|_| rng.gen_range(-2.0..2.0))
                .collect();
            match gradient_check(objective.as_ref(), &p, 1e-5) {
                Ok(err) => {
                    obj_worst = obj_worst.max(err);
                    if err > 1e-5 {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
        worst = worst.max(obj_worst);
        if !detail.is_empty() {
            detail.push_str(", ");
        }
        detail.push_str(&format!("{} {:.1e}", objective.name(), obj_worst));
    }
    CheckOutcome {
        group: "gradient-check",
        passed: failures == 0,
        detail: format!(
            "50 points per objective (worst rel err: {detail}), {failures} beyond 1e-5; overall worst {worst:.2e}"
        ),
    }
}
