//! Empirical audits of recorded trajectories: a Lyapunov-style potential
//! descent check on strongly convex problems, boundedness of the running
//! parameter average, the per-step momentum triangle inequality, and a
//! step-cost scaling benchmark.
//!
//! Audits are pure functions of the trajectory: re-running one yields an
//! identical report. They measure; they do not assume. Each report renders
//! as plain text and as machine-readable `key=value` lines.

mod scaling;

pub use scaling::{step_cost_benchmark, ScalingEntry, ScalingReport};

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::trajectory::Trajectory;
use crate::vector::{dot, l2_norm};

/// Data the potential function needs: the optimum, the gradient there, and
/// the strong convexity constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub theta_star: Vec<f64>,
    pub grad_at_star: Vec<f64>,
    pub m: f64,
}

impl PotentialSpec {
    /// Build from an objective with a known minimizer and strong convexity
    /// constant; errors when either is missing.
    pub fn for_objective(objective: &dyn Objective) -> Result<Self> {
        let theta_star = objective
            .minimizer()
            .ok_or_else(|| Error::MissingData("objective has no known minimizer".into()))?
            .to_vec();
        let m = objective.strong_convexity().ok_or_else(|| {
            Error::MissingData("objective has no strong convexity constant".into())
        })?;
        if !m.is_finite() || m <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "strong convexity constant must be > 0, got {m}"
            )));
        }
        let grad_at_star = objective.grad(&theta_star);
        Ok(Self {
            theta_star,
            grad_at_star,
            m,
        })
    }
}

/// Potential
/// `U(theta) = f(theta) - f(theta*) - <grad f(theta*), theta - theta*> + 1/(2m) ||theta - theta*||^2`.
/// Zero at the optimum and non-negative on strongly convex objectives.
pub fn potential_value(
    spec: &PotentialSpec,
    objective: &dyn Objective,
    theta: &[f64],
) -> Result<f64> {
    if theta.len() != spec.theta_star.len() {
        return Err(Error::ShapeMismatch {
            expected: spec.theta_star.len(),
            got: theta.len(),
        });
    }
    let diff: Vec<f64> = theta
        .iter()
        .zip(&spec.theta_star)
        .map(|(a, b)| a - b)
        .collect();
    let f_theta = objective.eval(theta);
    let f_star = objective.eval(&spec.theta_star);
    Ok(f_theta - f_star - dot(&spec.grad_at_star, &diff)
        + l2_norm(&diff).powi(2) / (2.0 * spec.m))
}

/// Outcome of the per-step potential descent audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    pub steps: usize,
    /// Tolerance `1e-9 * max(1, U(theta_0))`.
    pub tolerance: f64,
    /// Steps with `U(theta_{t+1}) <= U(theta_t) + tolerance`.
    pub non_increasing: usize,
    pub fraction_non_increasing: f64,
    /// Largest observed increase of `U` in one step (<= 0 when none).
    pub worst_violation: f64,
    /// Steps where the potential change stayed below the inequality's
    /// right-hand side, with the `f`-difference term unweighted.
    pub rhs_unweighted_holds: Option<usize>,
    /// Same with the `f`-difference term carrying the `2/m` factor.
    pub rhs_weighted_holds: Option<usize>,
    pub initial_potential: f64,
    pub final_potential: f64,
}

impl DescentReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("potential descent audit\n");
        s.push_str(&format!("  steps audited       : {}\n", self.steps));
        s.push_str(&format!("  tolerance           : {:.3e}\n", self.tolerance));
        s.push_str(&format!(
            "  non-increasing      : {} ({:.2}%)\n",
            self.non_increasing,
            100.0 * self.fraction_non_increasing
        ));
        s.push_str(&format!(
            "  worst one-step rise : {:.6e}\n",
            self.worst_violation
        ));
        match (self.rhs_unweighted_holds, self.rhs_weighted_holds) {
            (Some(u), Some(w)) => {
                s.push_str(&format!("  rhs holds (plain)   : {u}\n"));
                s.push_str(&format!("  rhs holds (2/m)     : {w}\n"));
            }
            _ => s.push_str("  rhs terms           : unavailable (no window data)\n"),
        }
        s.push_str(&format!(
            "  potential start/end : {:.6e} -> {:.6e}\n",
            self.initial_potential, self.final_potential
        ));
        s
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        s.push_str("audit=descent\n");
        s.push_str(&format!("steps={}\n", self.steps));
        s.push_str(&format!("tolerance={:.16e}\n", self.tolerance));
        s.push_str(&format!("non_increasing={}\n", self.non_increasing));
        s.push_str(&format!(
            "fraction_non_increasing={:.16e}\n",
            self.fraction_non_increasing
        ));
        s.push_str(&format!("worst_violation={:.16e}\n", self.worst_violation));
        if let Some(u) = self.rhs_unweighted_holds {
            s.push_str(&format!("rhs_unweighted_holds={u}\n"));
        }
        if let Some(w) = self.rhs_weighted_holds {
            s.push_str(&format!("rhs_weighted_holds={w}\n"));
        }
        s.push_str(&format!(
            "initial_potential={:.16e}\n",
            self.initial_potential
        ));
        s.push_str(&format!("final_potential={:.16e}\n", self.final_potential));
        s
    }
}

/// For each recorded step, compare `U` before and after, count the steps
/// where it did not increase beyond tolerance, and evaluate the descent
/// inequality's right-hand side
/// `-<grad f(theta_t) - grad f(theta*), (omega_t/delta) gamma_{t-1}>
///  + [f(theta_t) - f(theta_t - (omega_t/delta) gamma_{t-1})]`
/// in both its unweighted and `2/m`-weighted readings.
///
/// Needs every step logged with raw parameters. The report describes; only
/// the caller decides what to assert.
pub fn descent_audit(
    trajectory: &Trajectory,
    spec: &PotentialSpec,
    objective: &dyn Objective,
) -> Result<DescentReport> {
    trajectory.require_contiguous()?;
    let seq = trajectory.params_sequence()?;
    if seq.len() < 2 {
        return Err(Error::MissingData("trajectory has no steps".into()));
    }

    let potentials: Vec<f64> = seq
        .iter()
        .map(|theta| potential_value(spec, objective, theta))
        .collect::<Result<_>>()?;
    let tolerance = 1e-9 * potentials[0].max(1.0);

    let windowed = trajectory.records.iter().all(|r| r.omega.is_some())
        && trajectory.meta.delta.is_some();
    let delta = trajectory.meta.delta.unwrap_or(1) as f64;
    let gamma_fill = trajectory.meta.gamma_init.unwrap_or(0.0);
    let dimension = seq[0].len();

    let steps = seq.len() - 1;
    let mut non_increasing = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut rhs_plain = 0usize;
    let mut rhs_weighted = 0usize;

    for t in 0..steps {
        let du = potentials[t + 1] - potentials[t];
        if du <= tolerance {
            non_increasing += 1;
        }
        worst = worst.max(du);

        if windowed {
            // momentum entering this step, reconstructed from displacements
            let gamma_prev: Vec<f64> = if t == 0 {
                vec![gamma_fill; dimension]
            } else {
                seq[t - 1].iter().zip(seq[t]).map(|(a, b)| a - b).collect()
            };
            let omega = trajectory.records[t].omega.unwrap() as f64;
            let scale = omega / delta;
            let scaled: Vec<f64> = gamma_prev.iter().map(|g| scale * g).collect();
            let shifted: Vec<f64> = seq[t].iter().zip(&scaled).map(|(a, b)| a - b).collect();

            let grad_t = objective.grad(seq[t]);
            let grad_gap: Vec<f64> = grad_t
                .iter()
                .zip(&spec.grad_at_star)
                .map(|(a, b)| a - b)
                .collect();
            let inner = -dot(&grad_gap, &scaled);
            let f_gap = objective.eval(seq[t]) - objective.eval(&shifted);

            if du <= inner + f_gap + tolerance {
                rhs_plain += 1;
            }
            if du <= inner + (2.0 / spec.m) * f_gap + tolerance {
                rhs_weighted += 1;
            }
        }
    }

    Ok(DescentReport {
        steps,
        tolerance,
        non_increasing,
        fraction_non_increasing: non_increasing as f64 / steps as f64,
        worst_violation: worst,
        rhs_unweighted_holds: windowed.then_some(rhs_plain),
        rhs_weighted_holds: windowed.then_some(rhs_weighted),
        initial_potential: potentials[0],
        final_potential: *potentials.last().unwrap(),
    })
}

/// Outcome of the running-average boundedness audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedIterateReport {
    pub steps: usize,
    /// Norm of the start point (the bound's first empirical term).
    pub theta0_norm: f64,
    /// Largest recorded momentum norm (the bound's second empirical term).
    pub max_momentum_norm: f64,
    pub max_average_norm: f64,
    pub final_average_norm: f64,
    /// False when the average norm grows monotonically through the final
    /// quarter of the run by more than half again (a blow-up signature).
    pub bounded: bool,
    /// Earliest index from which the average norm is non-increasing to the
    /// end of the run.
    pub non_increasing_from: Option<usize>,
}

impl AveragedIterateReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("averaged iterate audit\n");
        s.push_str(&format!("  steps               : {}\n", self.steps));
        s.push_str(&format!("  ||theta_0||         : {:.6e}\n", self.theta0_norm));
        s.push_str(&format!(
            "  max ||gamma_t||     : {:.6e}\n",
            self.max_momentum_norm
        ));
        s.push_str(&format!(
            "  running avg norm    : max {:.6e}, final {:.6e}\n",
            self.max_average_norm, self.final_average_norm
        ));
        s.push_str(&format!("  bounded             : {}\n", self.bounded));
        match self.non_increasing_from {
            Some(t) => s.push_str(&format!("  non-increasing from : step {t}\n")),
            None => s.push_str("  non-increasing from : never\n"),
        }
        s
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        s.push_str("audit=averaged_iterate\n");
        s.push_str(&format!("steps={}\n", self.steps));
        s.push_str(&format!("theta0_norm={:.16e}\n", self.theta0_norm));
        s.push_str(&format!(
            "max_momentum_norm={:.16e}\n",
            self.max_momentum_norm
        ));
        s.push_str(&format!("max_average_norm={:.16e}\n", self.max_average_norm));
        s.push_str(&format!(
            "final_average_norm={:.16e}\n",
            self.final_average_norm
        ));
        s.push_str(&format!("bounded={}\n", self.bounded));
        if let Some(t) = self.non_increasing_from {
            s.push_str(&format!("non_increasing_from={t}\n"));
        }
        s
    }
}

/// Track the running parameter average `(1/(t+1)) sum_{i<=t} theta_i` over
/// the logged sequence and report whether its norm stays bounded.
pub fn averaged_iterate_bound(trajectory: &Trajectory) -> Result<AveragedIterateReport> {
    let seq = trajectory.params_sequence()?;
    let dimension = seq[0].len();

    let mut sum = vec![0.0; dimension];
    let mut avg_norms = Vec::with_capacity(seq.len());
    for (t, theta) in seq.iter().enumerate() {
        for (s, v) in sum.iter_mut().zip(*theta) {
            *s += v;
        }
        let scale = 1.0 / (t as f64 + 1.0);
        let norm = sum.iter().map(|s| (s * scale) * (s * scale)).sum::<f64>().sqrt();
        avg_norms.push(norm);
    }

    // earliest suffix over which the norm never rises (1e-12 slack)
    let mut from = avg_norms.len() - 1;
    while from > 0 && avg_norms[from] <= avg_norms[from - 1] + 1e-12 {
        from -= 1;
    }
    let non_increasing_from = if from == avg_norms.len() - 1 && avg_norms.len() > 1 {
        None
    } else {
        Some(from)
    };

    // blow-up signature: the final quarter rises monotonically and ends
    // at least 1.5x above where the quarter began
    let q = (avg_norms.len() / 4).max(2).min(avg_norms.len());
    let tail = &avg_norms[avg_norms.len() - q..];
    let monotone_up = tail.windows(2).all(|w| w[1] > w[0]);
    let blow_up = monotone_up && *tail.last().unwrap() > 1.5 * tail[0];

    let max_momentum_norm = trajectory
        .records
        .iter()
        .map(|r| r.momentum_norm)
        .fold(0.0, f64::max);

    Ok(AveragedIterateReport {
        steps: seq.len() - 1,
        theta0_norm: l2_norm(seq[0]),
        max_momentum_norm,
        max_average_norm: avg_norms.iter().copied().fold(0.0, f64::max),
        final_average_norm: *avg_norms.last().unwrap(),
        bounded: !blow_up,
        non_increasing_from,
    })
}

/// Outcome of the per-step momentum triangle-inequality audit.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumBoundReport {
    pub steps: usize,
    /// Steps where `||gamma_t|| > (omega_t/delta) ||gamma_{t-1}|| + ||alpha .* g|| + 1e-12`.
    pub violations: usize,
    /// Largest excess of the left side over the right (<= 0 when none).
    pub max_excess: f64,
    /// Smallest slack between the right and left sides.
    pub min_slack: f64,
}

impl MomentumBoundReport {
    pub fn to_text(&self) -> String {
        format!(
            "momentum bound audit\n  steps      : {}\n  violations : {}\n  max excess : {:.6e}\n  min slack  : {:.6e}\n",
            self.steps, self.violations, self.max_excess, self.min_slack
        )
    }

    pub fn to_kv(&self) -> String {
        format!(
            "audit=momentum_bound\nsteps={}\nviolations={}\nmax_excess={:.16e}\nmin_slack={:.16e}\n",
            self.steps, self.violations, self.max_excess, self.min_slack
        )
    }
}

/// Check `||gamma_t||_inf <= (omega_t/delta) ||gamma_{t-1}||_inf +
/// ||alpha_t .* g_t||_inf + 1e-12` at every recorded step. Holds by
/// construction of the momentum recurrence on any trajectory the windowed
/// optimizer produced; a violation is a build-breaking bug.
pub fn momentum_bound_audit(trajectory: &Trajectory) -> Result<MomentumBoundReport> {
    trajectory.require_contiguous()?;
    let delta = trajectory
        .meta
        .delta
        .ok_or_else(|| Error::MissingData("trajectory has no window limit".into()))?
        as f64;
    let gamma_fill = trajectory.meta.gamma_init.unwrap_or(0.0).abs();

    let mut violations = 0usize;
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_slack = f64::INFINITY;
    for (t, r) in trajectory.records.iter().enumerate() {
        let omega = r
            .omega
            .ok_or_else(|| Error::MissingData(format!("record {t} has no window size")))?
            as f64;
        let prev = if t == 0 {
            gamma_fill
        } else {
            trajectory.records[t - 1].momentum_norm
        };
        let lhs = r.momentum_norm;
        let rhs = (omega / delta) * prev + r.update_norm + 1e-12;
        if lhs > rhs {
            violations += 1;
        }
        max_excess = max_excess.max(lhs - rhs);
        min_slack = min_slack.min(rhs - lhs);
    }

    Ok(MomentumBoundReport {
        steps: trajectory.records.len(),
        violations,
        max_excess,
        min_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Quadratic;
    use crate::optim::{DwmGrad, DwmGradConfig};
    use crate::runner::{drive, DriveOptions};
    use crate::vector::ParamVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dwmgrad_run(objective: &Quadratic, start: Vec<f64>, iterations: u64) -> Trajectory {
        let mut opt = DwmGrad::new(DwmGradConfig::default(), start.len()).unwrap();
        let start = ParamVector::new(start).unwrap();
        drive(
            &mut opt,
            objective,
            &start,
            &DriveOptions {
                iterations,
                log_params: true,
                ..DriveOptions::default()
            },
        )
        .unwrap()
        .trajectory
    }

    #[test]
    fn potential_zero_at_optimum() {
        let f = Quadratic::seeded(4, 10.0, 2).unwrap();
        let spec = PotentialSpec::for_objective(&f).unwrap();
        let u = potential_value(&spec, &f, &[0.0; 4]).unwrap();
        assert!(u.abs() <= 1e-12);
    }

    #[test]
    fn potential_on_identity_quadratic() {
        // f = 0.5||theta||^2, m = 1, theta* = 0:
        // U(1, 0) = 0.5 - 0 + 0.5 * 1 = 1.0
        let f = Quadratic::identity(2).unwrap();
        let spec = PotentialSpec::for_objective(&f).unwrap();
        let u = potential_value(&spec, &f, &[1.0, 0.0]).unwrap();
        assert!((u - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn potential_non_negative_at_random_points() {
        let f = Quadratic::seeded(5, 30.0, 8).unwrap();
        let spec = PotentialSpec::for_objective(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
            assert!(potential_value(&spec, &f, &p).unwrap() >= 0.0);
        }
    }

    #[test]
    fn potential_requires_strong_convexity() {
        let f = crate::objectives::Rosenbrock::new();
        assert!(PotentialSpec::for_objective(&f).is_err());
    }

    #[test]
    fn descent_audit_on_converging_quadratic() {
        let f = Quadratic::seeded(10, 10.0, 1).unwrap();
        let t = dwmgrad_run(&f, vec![1.0; 10], 2000);
        let spec = PotentialSpec::for_objective(&f).unwrap();
        let report = descent_audit(&t, &spec, &f).unwrap();
        assert_eq!(report.steps, 2000);
        assert!(
            report.fraction_non_increasing >= 0.95,
            "fraction = {}",
            report.fraction_non_increasing
        );
        // pure function of the trajectory
        assert_eq!(report, descent_audit(&t, &spec, &f).unwrap());
    }

    #[test]
    fn descent_audit_constant_trajectory_is_flat() {
        let f = Quadratic::identity(2).unwrap();
        let spec = PotentialSpec::for_objective(&f).unwrap();
        let mut t = dwmgrad_run(&f, vec![1.0, 1.0], 5);
        // freeze every snapshot at the start point
        for r in &mut t.records {
            r.params = Some(vec![1.0, 1.0]);
        }
        let report = descent_audit(&t, &spec, &f).unwrap();
        assert_eq!(report.non_increasing, report.steps);
        assert_eq!(report.worst_violation, 0.0);
    }

    #[test]
    fn descent_audit_flags_divergence_without_asserting() {
        let f = Quadratic::seeded(4, 10.0, 5).unwrap();
        let mut opt = DwmGrad::new(
            DwmGradConfig {
                alpha0: 50.0,
                ..DwmGradConfig::default()
            },
            4,
        )
        .unwrap();
        let start = ParamVector::new(vec![1.0; 4]).unwrap();
        let out = drive(
            &mut opt,
            &f,
            &start,
            &DriveOptions {
                iterations: 200,
                log_params: true,
                ..DriveOptions::default()
            },
        )
        .unwrap();
        let spec = PotentialSpec::for_objective(&f).unwrap();
        let report = descent_audit(&out.trajectory, &spec, &f).unwrap();
        assert!(report.fraction_non_increasing < 1.0);
        assert!(report.worst_violation > 0.0);
    }

    #[test]
    fn averaged_iterate_constant_trajectory() {
        let f = Quadratic::identity(2).unwrap();
        let mut t = dwmgrad_run(&f, vec![3.0, 4.0], 10);
        for r in &mut t.records {
            r.params = Some(vec![3.0, 4.0]);
        }
        let report = averaged_iterate_bound(&t).unwrap();
        assert_eq!(report.theta0_norm, 5.0);
        assert_eq!(report.max_average_norm, 5.0);
        assert_eq!(report.final_average_norm, 5.0);
        assert!(report.bounded);
        assert_eq!(report.non_increasing_from, Some(0));
    }

    #[test]
    fn averaged_iterate_single_step() {
        let f = Quadratic::identity(2).unwrap();
        let t = dwmgrad_run(&f, vec![1.0, 0.0], 1);
        let report = averaged_iterate_bound(&t).unwrap();
        assert_eq!(report.steps, 1);
        assert!(report.bounded);
    }

    #[test]
    fn averaged_iterate_converging_run_reports_t0() {
        let f = Quadratic::seeded(6, 5.0, 12).unwrap();
        let t = dwmgrad_run(&f, vec![2.0; 6], 1500);
        let report = averaged_iterate_bound(&t).unwrap();
        assert!(report.bounded);
        let t0 = report.non_increasing_from.expect("converging run settles");
        assert!(t0 < 1500);
    }

    #[test]
    fn momentum_bound_holds_on_recorded_run() {
        let f = Quadratic::seeded(5, 10.0, 3).unwrap();
        let t = dwmgrad_run(&f, vec![1.0; 5], 500);
        let report = momentum_bound_audit(&t).unwrap();
        assert_eq!(report.violations, 0, "max excess {}", report.max_excess);
    }

    #[test]
    fn momentum_bound_flags_tampered_record() {
        let f = Quadratic::seeded(3, 10.0, 6).unwrap();
        let mut t = dwmgrad_run(&f, vec![1.0; 3], 20);
        t.records[10].momentum_norm = 1e6;
        let report = momentum_bound_audit(&t).unwrap();
        // the tampered step violates; its successor gets extra headroom
        assert!(report.violations >= 1);
        assert!(report.max_excess > 0.0);
    }

    #[test]
    fn momentum_decays_geometrically_under_zero_gradient() {
        // constant objective: zero gradient everywhere, constant loss
        struct Flat;
        impl crate::objectives::Objective for Flat {
            fn name(&self) -> &str {
                "flat"
            }
            fn dimension(&self) -> usize {
                2
            }
            fn eval(&self, _p: &[f64]) -> f64 {
                5.0
            }
            fn grad(&self, _p: &[f64]) -> Vec<f64> {
                vec![0.0, 0.0]
            }
        }
        let mut opt = DwmGrad::new(
            DwmGradConfig {
                gamma_init: 0.8,
                ..DwmGradConfig::default()
            },
            2,
        )
        .unwrap();
        let start = ParamVector::new(vec![1.0, 1.0]).unwrap();
        let out = drive(
            &mut opt,
            &Flat,
            &start,
            &DriveOptions {
                iterations: 12,
                log_params: true,
                ..DriveOptions::default()
            },
        )
        .unwrap();
        let t = out.trajectory;

        // with g = 0 the recurrence is pure decay by omega_t / delta
        let mut expected = 0.8;
        for r in &t.records {
            expected *= r.omega.unwrap() as f64 / 10.0;
            assert!(
                (r.momentum_norm - expected).abs() <= 1e-12 * expected.max(1e-300),
                "step {}: {} vs {}",
                r.step,
                r.momentum_norm,
                expected
            );
        }
        let report = momentum_bound_audit(&t).unwrap();
        assert_eq!(report.violations, 0);
    }
}
