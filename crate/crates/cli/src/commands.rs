//! The run / compare / sweep commands: execute experiments, write trajectory
//! CSVs, audit reports and comparison tables under the output directory.

use crate::config::{CompareConfig, OptimizerBlock, RunConfig, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::experiment::{build_objective, build_optimizer, drive_options, start_point};
use dwmgrad::diagnostics::{
    averaged_iterate_bound, descent_audit, momentum_bound_audit, PotentialSpec,
};
use dwmgrad::objectives::Objective;
use dwmgrad::runner::{drive, RunOutput};
use dwmgrad::trajectory::Trajectory;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// What `run` left on disk and in memory.
pub struct RunArtifacts {
    pub trajectory: Trajectory,
    pub csv_path: PathBuf,
    pub audit_paths: Vec<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", path.display())))
}

fn execute(config: &RunConfig) -> Result<RunOutput> {
    let objective = build_objective(&config.objective, config.experiment.seed)?;
    let mut optimizer = build_optimizer(&config.optimizer, objective.dimension())?;
    let start = start_point(
        &config.objective,
        config.experiment.start_point.as_ref(),
        objective.as_ref(),
        config.experiment.seed,
    )?;
    Ok(drive(
        optimizer.as_mut(),
        objective.as_ref(),
        &start,
        &drive_options(&config.experiment),
    )?)
}

/// Run one experiment and write `<stem>.csv` (plus audit reports when
/// parameters were logged). A numerical failure still flushes the partial
/// trajectory before erroring out.
pub fn run(config: &RunConfig, stem: &str, out_dir: &Path, quiet: bool) -> Result<RunArtifacts> {
    fs::create_dir_all(out_dir)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let output = execute(config)?;

    let csv_path = out_dir.join(format!("{stem}.csv"));
    write_file(&csv_path, &output.trajectory.to_csv_string())?;

    if let Some(failure) = &output.failure {
        eprintln!("run aborted: {failure}; partial trajectory in {}", csv_path.display());
        return Err(HarnessError::Numerical(failure.to_string()));
    }

    let mut audit_paths = Vec::new();
    if config.experiment.log_params {
        let objective = build_objective(&config.objective, config.experiment.seed)?;
        let (text, kv) = audits_for(&output.trajectory, objective.as_ref())?;
        let txt_path = out_dir.join(format!("{stem}.audit.txt"));
        let kv_path = out_dir.join(format!("{stem}.audit.kv"));
        write_file(&txt_path, &text)?;
        write_file(&kv_path, &kv)?;
        audit_paths.push(txt_path);
        audit_paths.push(kv_path);
    }

    if !quiet {
        println!(
            "{}: {} on {} for {} steps -> final loss {:.6e}, best {:.6e} ({})",
            stem,
            output.trajectory.meta.optimizer,
            output.trajectory.meta.objective,
            output.trajectory.records.last().map_or(0, |r| r.step + 1),
            output.trajectory.final_loss,
            output.trajectory.best_loss(),
            csv_path.display()
        );
    }

    Ok(RunArtifacts {
        trajectory: output.trajectory,
        csv_path,
        audit_paths,
    })
}

/// Every audit the trajectory supports, as one text and one key-value blob.
fn audits_for(trajectory: &Trajectory, objective: &dyn Objective) -> Result<(String, String)> {
    let mut text = String::new();
    let mut kv = String::new();

    let averaged = averaged_iterate_bound(trajectory)?;
    text.push_str(&averaged.to_text());
    kv.push_str(&averaged.to_kv());

    if trajectory.meta.delta.is_some() {
        let momentum = momentum_bound_audit(trajectory)?;
        text.push('\n');
        text.push_str(&momentum.to_text());
        kv.push('\n');
        kv.push_str(&momentum.to_kv());
    }

    if let Ok(spec) = PotentialSpec::for_objective(objective) {
        let descent = descent_audit(trajectory, &spec, objective)?;
        text.push('\n');
        text.push_str(&descent.to_text());
        kv.push('\n');
        kv.push_str(&descent.to_kv());
    }

    Ok((text, kv))
}

/// One optimizer's row in a comparison.
pub struct ComparisonRow {
    pub label: String,
    pub final_loss: f64,
    pub best_loss: f64,
    pub steps_to_threshold: Option<u64>,
}

pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub merged_csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub trajectories: Vec<Trajectory>,
}

/// Distinct column labels: optimizer names, with `_2`, `_3` suffixes for
/// repeats.
fn labels_for(blocks: &[OptimizerBlock]) -> Vec<String> {
    let mut labels = Vec::with_capacity(blocks.len());
    for block in blocks {
        let mut label = block.name.clone();
        let mut n = 1;
        while labels.contains(&label) {
            n += 1;
            label = format!("{}_{n}", block.name);
        }
        labels.push(label);
    }
    labels
}

/// Run every optimizer on the shared objective and emit per-run CSVs, a
/// merged one-loss-column-per-optimizer CSV, and a plain-text summary table.
pub fn compare(
    config: &CompareConfig,
    stem: &str,
    out_dir: &Path,
    quiet: bool,
) -> Result<ComparisonReport> {
    if config.optimizers.is_empty() {
        return Err(HarnessError::Config("compare needs at least one optimizer".into()));
    }
    fs::create_dir_all(out_dir)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", out_dir.display())))?;

    let labels = labels_for(&config.optimizers);
    let mut trajectories = Vec::with_capacity(config.optimizers.len());
    for (block, label) in config.optimizers.iter().zip(&labels) {
        let run_config = RunConfig {
            experiment: config.experiment.clone(),
            objective: config.objective.clone(),
            optimizer: block.clone(),
        };
        let output = execute(&run_config)?;
        let csv_path = out_dir.join(format!("{stem}.{label}.csv"));
        write_file(&csv_path, &output.trajectory.to_csv_string())?;
        if let Some(failure) = &output.failure {
            eprintln!("{label} aborted: {failure}; partial trajectory in {}", csv_path.display());
            return Err(HarnessError::Numerical(format!("{label}: {failure}")));
        }
        trajectories.push(output.trajectory);
    }

    // merged CSV over the union of recorded steps; a run missing a step
    // leaves its cell empty
    let mut steps: Vec<u64> = trajectories
        .iter()
        .flat_map(|t| t.records.iter().map(|r| r.step))
        .collect();
    steps.sort_unstable();
    steps.dedup();

    let mut merged = String::from("step");
    for label in &labels {
        write!(merged, ",loss_{label}").unwrap();
    }
    merged.push('\n');
    for &step in &steps {
        write!(merged, "{step}").unwrap();
        for t in &trajectories {
            match t.records.iter().find(|r| r.step == step) {
                Some(r) => write!(merged, ",{:.16e}", r.loss).unwrap(),
                None => merged.push(','),
            }
        }
        merged.push('\n');
    }
    let merged_csv_path = out_dir.join(format!("{stem}.compare.csv"));
    write_file(&merged_csv_path, &merged)?;

    let rows: Vec<ComparisonRow> = trajectories
        .iter()
        .zip(&labels)
        .map(|(t, label)| ComparisonRow {
            label: label.clone(),
            final_loss: t.final_loss,
            best_loss: t.best_loss(),
            steps_to_threshold: config.compare.threshold.and_then(|threshold| {
                t.records.iter().find(|r| r.loss < threshold).map(|r| r.step)
            }),
        })
        .collect();

    let mut summary = String::new();
    writeln!(
        summary,
        "comparison on {} ({} iterations, seed {})",
        config.objective.name, config.experiment.iterations, config.experiment.seed
    )
    .unwrap();
    writeln!(
        summary,
        "{:<14} {:>14} {:>14} {:>18}",
        "optimizer", "final loss", "best loss", "steps-to-threshold"
    )
    .unwrap();
    for row in &rows {
        let to_threshold = row
            .steps_to_threshold
            .map_or("-".to_string(), |s| s.to_string());
        writeln!(
            summary,
            "{:<14} {:>14.6e} {:>14.6e} {:>18}",
            row.label, row.final_loss, row.best_loss, to_threshold
        )
        .unwrap();
    }
    let summary_path = out_dir.join(format!("{stem}.summary.txt"));
    write_file(&summary_path, &summary)?;

    if !quiet {
        print!("{summary}");
    }

    Ok(ComparisonReport {
        rows,
        merged_csv_path,
        summary_path,
        trajectories,
    })
}

/// One grid point in a sweep.
pub struct SweepRow {
    pub index: usize,
    pub assignment: String,
    pub final_loss: f64,
    pub best_loss: f64,
}

pub struct SweepReport {
    /// Rows in grid order.
    pub rows: Vec<SweepRow>,
    /// Row indices sorted best-first.
    pub ranking: Vec<usize>,
    pub report_path: PathBuf,
}

/// Apply one grid value to an optimizer block field.
fn apply_grid_value(
    block: &mut OptimizerBlock,
    key: &str,
    value: &toml::Value,
) -> Result<()> {
    let as_f64 = || -> Result<f64> {
        match value {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            other => Err(HarnessError::Config(format!(
                "grid value for '{key}' must be a number, got {other}"
            ))),
        }
    };
    let as_u32 = || -> Result<u32> {
        match value {
            toml::Value::Integer(i) if *i >= 0 => Ok(*i as u32),
            other => Err(HarnessError::Config(format!(
                "grid value for '{key}' must be a non-negative integer, got {other}"
            ))),
        }
    };
    let as_string = || -> Result<String> {
        match value {
            toml::Value::String(s) => Ok(s.clone()),
            other => Err(HarnessError::Config(format!(
                "grid value for '{key}' must be a string, got {other}"
            ))),
        }
    };
    match key {
        "alpha0" => block.alpha0 = Some(as_f64()?),
        "gamma_init" => block.gamma_init = Some(as_f64()?),
        "epsilon" => block.epsilon = Some(as_f64()?),
        "momentum" => block.momentum = Some(as_f64()?),
        "decay" => block.decay = Some(as_f64()?),
        "beta1" => block.beta1 = Some(as_f64()?),
        "beta2" => block.beta2 = Some(as_f64()?),
        "weight_decay" => block.weight_decay = Some(as_f64()?),
        "omega_init" => block.omega_init = Some(as_u32()?),
        "delta" => block.delta = Some(as_u32()?),
        "beta_mode" => block.beta_mode = Some(as_string()?),
        "second_moment_rule" => block.second_moment_rule = Some(as_string()?),
        "preset" => block.preset = Some(as_string()?),
        other => {
            return Err(HarnessError::Config(format!(
                "unknown hyperparameter '{other}' in sweep grid"
            )))
        }
    }
    Ok(())
}

/// Cartesian-product sweep over optimizer hyperparameters. Keys iterate in
/// sorted order and values in listed order, so grid position `i` always
/// names the same setting; the report ranks settings by best loss.
pub fn sweep(
    config: &SweepConfig,
    stem: &str,
    out_dir: &Path,
    quiet: bool,
) -> Result<SweepReport> {
    let mut keys: Vec<&String> = config.sweep.grid.keys().collect();
    keys.sort();
    if keys.is_empty() {
        return Err(HarnessError::Config("sweep grid is empty".into()));
    }
    let mut value_lists: Vec<(&str, &[toml::Value])> = Vec::with_capacity(keys.len());
    for key in keys {
        let values = config.sweep.grid[key].as_array().ok_or_else(|| {
            HarnessError::Config(format!("grid entry '{key}' must be a list of values"))
        })?;
        if values.is_empty() {
            return Err(HarnessError::Config(format!(
                "grid entry '{key}' has no values"
            )));
        }
        value_lists.push((key, values));
    }

    let total: usize = value_lists.iter().map(|(_, vs)| vs.len()).product();
    fs::create_dir_all(out_dir)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut rows = Vec::with_capacity(total);
    for index in 0..total {
        let mut block = config.optimizer.clone();
        let mut assignment = String::new();
        let mut radix = index;
        for (key, values) in &value_lists {
            let pick = radix % values.len();
            radix /= values.len();
            apply_grid_value(&mut block, key, &values[pick])?;
            if !assignment.is_empty() {
                assignment.push_str(", ");
            }
            write!(assignment, "{key}={}", values[pick]).unwrap();
        }

        let run_config = RunConfig {
            experiment: config.experiment.clone(),
            objective: config.objective.clone(),
            optimizer: block,
        };
        let output = execute(&run_config)?;
        let csv_path = out_dir.join(format!("{stem}.sweep{index:03}.csv"));
        write_file(&csv_path, &output.trajectory.to_csv_string())?;
        if let Some(failure) = &output.failure {
            eprintln!("grid point {index} ({assignment}) aborted: {failure}");
            return Err(HarnessError::Numerical(format!("{assignment}: {failure}")));
        }
        rows.push(SweepRow {
            index,
            assignment,
            final_loss: output.trajectory.final_loss,
            best_loss: output.trajectory.best_loss(),
        });
    }

    let mut ranking: Vec<usize> = (0..rows.len()).collect();
    ranking.sort_by(|&a, &b| {
        rows[a]
            .best_loss
            .partial_cmp(&rows[b].best_loss)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut report = String::new();
    writeln!(
        report,
        "sweep of {} on {} ({} settings, ranked by best loss)",
        config.optimizer.name, config.objective.name, rows.len()
    )
    .unwrap();
    writeln!(report, "{:<6} {:>14} {:>14}  setting", "rank", "best loss", "final loss").unwrap();
    for (rank, &i) in ranking.iter().enumerate() {
        writeln!(
            report,
            "{:<6} {:>14.6e} {:>14.6e}  sweep{:03}: {}",
            rank + 1,
            rows[i].best_loss,
            rows[i].final_loss,
            rows[i].index,
            rows[i].assignment
        )
        .unwrap();
    }
    let report_path = out_dir.join(format!("{stem}.sweep.txt"));
    write_file(&report_path, &report)?;

    if !quiet {
        print!("{report}");
    }

    Ok(SweepReport {
        rows,
        ranking,
        report_path,
    })
}
