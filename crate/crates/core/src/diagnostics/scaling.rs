//! Per-step wall-time scaling of the windowed optimizer against Adam.
//!
//! One step costs a constant number of elementwise passes, so the median
//! per-step time should grow linearly in the dimension. Timing must run in
//! isolation (no concurrent work) for the medians to mean anything.

use crate::error::{Error, Result};
use crate::optim::{Adam, AdamConfig, DwmGrad, DwmGradConfig, Optimizer, StepInput};
use crate::vector::ParamVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Timings for one dimension and its double, nanoseconds per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingEntry {
    pub dimension: usize,
    pub dwmgrad_ns: f64,
    pub adam_ns: f64,
    pub dwmgrad_doubled_ns: f64,
    pub adam_doubled_ns: f64,
}

impl ScalingEntry {
    /// Per-step time ratio when the dimension doubles.
    pub fn dwmgrad_doubling_ratio(&self) -> f64 {
        self.dwmgrad_doubled_ns / self.dwmgrad_ns
    }

    pub fn adam_doubling_ratio(&self) -> f64 {
        self.adam_doubled_ns / self.adam_ns
    }

    /// How much slower one windowed step is than one Adam step.
    pub fn dwmgrad_over_adam(&self) -> f64 {
        self.dwmgrad_ns / self.adam_ns
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub repetitions: usize,
    pub entries: Vec<ScalingEntry>,
}

impl ScalingReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("step cost scaling (median ns per step)\n");
        s.push_str(&format!("  repetitions: {}\n", self.repetitions));
        s.push_str("  dimension     dwmgrad         adam    x2 ratio   vs adam\n");
        for e in &self.entries {
            s.push_str(&format!(
                "  {:>9} {:>11.0} {:>12.0} {:>11.2} {:>9.2}\n",
                e.dimension,
                e.dwmgrad_ns,
                e.adam_ns,
                e.dwmgrad_doubling_ratio(),
                e.dwmgrad_over_adam()
            ));
        }
        s
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::from("audit=step_cost\n");
        s.push_str(&format!("repetitions={}\n", self.repetitions));
        for e in &self.entries {
            s.push_str(&format!("dwmgrad_ns_d{}={:.3}\n", e.dimension, e.dwmgrad_ns));
            s.push_str(&format!("adam_ns_d{}={:.3}\n", e.dimension, e.adam_ns));
            s.push_str(&format!(
                "dwmgrad_doubling_ratio_d{}={:.6}\n",
                e.dimension,
                e.dwmgrad_doubling_ratio()
            ));
            s.push_str(&format!(
                "dwmgrad_over_adam_d{}={:.6}\n",
                e.dimension,
                e.dwmgrad_over_adam()
            ));
        }
        s
    }
}

/// Measure the median per-step wall time of DWMGrad and Adam at each listed
/// dimension and at its double.
///
/// `dimensions` must be sorted ascending; entries should be at least 1e4 so
/// fixed per-step overhead stays negligible next to the elementwise passes.
pub fn step_cost_benchmark(dimensions: &[usize], repetitions: usize) -> Result<ScalingReport> {
    if dimensions.is_empty() {
        return Err(Error::InvalidConfig("no dimensions given".into()));
    }
    if dimensions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig(
            "dimensions must be sorted ascending".into(),
        ));
    }
    if repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be >= 1".into()));
    }

    let mut entries = Vec::with_capacity(dimensions.len());
    for &d in dimensions {
        entries.push(ScalingEntry {
            dimension: d,
            dwmgrad_ns: median_step_ns(OptKind::Dwm, d, repetitions)?,
            adam_ns: median_step_ns(OptKind::Adam, d, repetitions)?,
            dwmgrad_doubled_ns: median_step_ns(OptKind::Dwm, 2 * d, repetitions)?,
            adam_doubled_ns: median_step_ns(OptKind::Adam, 2 * d, repetitions)?,
        });
    }
    Ok(ScalingReport {
        repetitions,
        entries,
    })
}

enum OptKind {
    Dwm,
    Adam,
}

fn median_step_ns(kind: OptKind, dimension: usize, repetitions: usize) -> Result<f64> {
    let mut optimizer: Box<dyn Optimizer> = match kind {
        OptKind::Dwm => Box::new(DwmGrad::new(DwmGradConfig::default(), dimension)?),
        OptKind::Adam => Box::new(Adam::new(AdamConfig::default(), dimension)?),
    };
    let mut params = ParamVector::filled(dimension, 0.5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(dimension as u64);
    let gradient: Vec<f64> = (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect();

    // enough steps per burst that one burst takes milliseconds
    let steps_per_burst = (4_000_000 / dimension).max(1);
    let mut step_index = 0u64;
    let mut run_burst = |optimizer: &mut dyn Optimizer, params: &mut ParamVector| {
        let start = Instant::now();
        for _ in 0..steps_per_burst {
            step_index += 1;
            // mildly varying loss keeps the window controller active
            let loss = 1.0 / step_index as f64;
            optimizer
                .step(
                    params,
                    StepInput {
                        gradient: &gradient,
                        loss,
                    },
                )
                .expect("benchmark step");
        }
        start.elapsed().as_nanos() as f64 / steps_per_burst as f64
    };

    // warm-up burst to touch every page
    run_burst(optimizer.as_mut(), &mut params);
    let mut samples: Vec<f64> = (0..repetitions)
        .map(|_| run_burst(optimizer.as_mut(), &mut params))
        .collect();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(samples[samples.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_repetition_report_is_well_formed() {
        let report = step_cost_benchmark(&[1000], 1).unwrap();
        assert_eq!(report.entries.len(), 1);
        let e = &report.entries[0];
        assert!(e.dwmgrad_ns > 0.0 && e.adam_ns > 0.0);
        assert!(e.dwmgrad_doubling_ratio() > 0.0);
        assert!(!report.to_text().is_empty());
        assert!(report.to_kv().contains("dwmgrad_ns_d1000="));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(step_cost_benchmark(&[], 3).is_err());
        assert!(step_cost_benchmark(&[100, 50], 3).is_err());
        assert!(step_cost_benchmark(&[100], 0).is_err());
    }
}
