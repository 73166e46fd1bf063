use clap::{Parser, Subcommand};
use dwmgrad_cli::commands;
use dwmgrad_cli::config;
use dwmgrad_cli::error::{HarnessError, Result};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "dwmgrad",
    about = "Run, compare and sweep optimizer experiments; emit trajectory CSVs and audit reports",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Output directory for CSVs and reports
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the experiment seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override how often steps are recorded
    #[arg(long)]
    log_every: Option<u64>,
    /// Suppress progress output
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run several optimizers on one shared objective and tabulate them
    Compare {
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cartesian-product hyperparameter sweep
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the oracle / invariant / gradient-check suite
    Check,
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_string())
}

fn apply_overrides(experiment: &mut config::ExperimentBlock, common: &CommonArgs) {
    if let Some(seed) = common.seed {
        experiment.seed = seed;
    }
    if let Some(log_every) = common.log_every {
        experiment.log_every = log_every;
    }
}

fn run_cli() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, common } => {
            let mut parsed = config::parse_run(&read_config(&config)?)?;
            apply_overrides(&mut parsed.experiment, &common);
            commands::run(&parsed, &stem_of(&config), &common.out, common.quiet)?;
            Ok(())
        }
        Command::Compare { config, common } => {
            let mut parsed = config::parse_compare(&read_config(&config)?)?;
            apply_overrides(&mut parsed.experiment, &common);
            commands::compare(&parsed, &stem_of(&config), &common.out, common.quiet)?;
            Ok(())
        }
        Command::Sweep { config, common } => {
            let mut parsed = config::parse_sweep(&read_config(&config)?)?;
            apply_overrides(&mut parsed.experiment, &common);
            commands::sweep(&parsed, &stem_of(&config), &common.out, common.quiet)?;
            Ok(())
        }
        Command::Check => {
            let outcomes = dwmgrad_cli::check::run_all();
            for o in &outcomes {
                println!(
                    "{} {:<28} {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.group,
                    o.detail
                );
            }
            if dwmgrad_cli::check::all_passed(&outcomes) {
                Ok(())
            } else {
                Err(HarnessError::CheckFailed(
                    outcomes
                        .iter()
                        .filter(|o| !o.passed)
                        .map(|o| o.group)
                        .collect::<Vec<_>>()
                        .join(", "),
                ))
            }
        }
    }
}

fn main() {
    match run_cli() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
