//! Per-run logging: one record per optimizer step plus a snapshot of the
//! settings the run was produced under, and the fixed CSV schema the harness
//! writes.

use crate::error::{Error, Result};
use std::io::Write;

/// One logged step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Zero-based optimizer step index.
    pub step: u64,
    /// Objective value the optimizer consumed this step (before the update).
    pub loss: f64,
    /// Window size after this step; `None` for baselines.
    pub omega: Option<u32>,
    /// Infinity norm of the gradient fed to the optimizer.
    pub grad_norm: f64,
    /// Infinity norm of the momentum / velocity vector after the step.
    pub momentum_norm: f64,
    pub lr_min: f64,
    pub lr_mean: f64,
    pub lr_max: f64,
    /// Infinity norm of the gradient-driven update term (for the windowed
    /// optimizer, max_i |alpha_i g_i|; consumed by the momentum bound audit).
    pub update_norm: f64,
    /// True when some per-parameter step size exceeded 1e3 times the base
    /// learning rate this step.
    pub lr_ceiling_flag: bool,
    /// Parameters after the step, when parameter logging is on.
    pub params: Option<Vec<f64>>,
}

/// Snapshot of the settings a trajectory was recorded under.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub optimizer: String,
    pub objective: String,
    pub seed: u64,
    pub iterations: u64,
    pub log_every: u64,
    pub log_params: bool,
    /// Base learning rate of the optimizer.
    pub alpha0: f64,
    /// Maximum window of the windowed optimizer; `None` for baselines.
    pub delta: Option<u32>,
    /// Initial momentum fill of the windowed optimizer.
    pub gamma_init: Option<f64>,
    pub start_point: Vec<f64>,
    pub stop_loss: Option<f64>,
    pub batch_size: Option<usize>,
}

/// A recorded run: records in step order plus the final state of the
/// parameters and the full-batch loss there.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub meta: RunMeta,
    pub records: Vec<TrajectoryRecord>,
    pub final_params: Vec<f64>,
    pub final_loss: f64,
}

impl Trajectory {
    /// Smallest loss seen anywhere in the run, final point included.
    pub fn best_loss(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.loss)
            .fold(self.final_loss, f64::min)
    }

    /// Errors unless record `i` describes step `i` (i.e. the run was logged
    /// with `log_every = 1`), which the step-by-step audits require.
    pub fn require_contiguous(&self) -> Result<()> {
        for (i, r) in self.records.iter().enumerate() {
            if r.step != i as u64 {
                return Err(Error::MissingData(format!(
                    "record {i} describes step {}; audits need every step logged (log_every = 1)",
                    r.step
                )));
            }
        }
        Ok(())
    }

    /// The parameter sequence `[start, theta_1, ..., theta_n]`; errors when
    /// parameter logging was off.
    pub fn params_sequence(&self) -> Result<Vec<&[f64]>> {
        let mut seq: Vec<&[f64]> = Vec::with_capacity(self.records.len() + 1);
        seq.push(&self.meta.start_point);
        for (i, r) in self.records.iter().enumerate() {
            seq.push(
                r.params
                    .as_deref()
                    .ok_or_else(|| {
                        Error::MissingData(format!(
                            "record {i} has no parameters; rerun with log_params = true"
                        ))
                    })?,
            );
        }
        Ok(seq)
    }

    /// Write the fixed CSV schema: a header naming every record field, then
    /// one row per record. Floats carry 17 significant digits so values
    /// round-trip losslessly; the byte output is identical for identical
    /// trajectories.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(
            out,
            "step,loss,omega,grad_norm,momentum_norm,lr_min,lr_mean,lr_max,update_norm,lr_ceiling_flag"
        )?;
        if self.meta.log_params {
            for k in 0..self.meta.start_point.len() {
                write!(out, ",p{k}")?;
            }
        }
        writeln!(out)?;
        for r in &self.records {
            write!(out, "{},{:.16e},", r.step, r.loss)?;
            if let Some(w) = r.omega {
                write!(out, "{w}")?;
            }
            write!(
                out,
                ",{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.grad_norm,
                r.momentum_norm,
                r.lr_min,
                r.lr_mean,
                r.lr_max,
                r.update_norm,
                r.lr_ceiling_flag
            )?;
            if let Some(params) = &r.params {
                for p in params {
                    write!(out, ",{p:.16e}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}
