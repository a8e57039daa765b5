//! Experiment driver. Loads a config (or starts from defaults), applies
//! flag overrides, runs the scenario grid, and writes the report files.

use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use phc_divert::experiment::{
    load_config, run_experiment, sensitivity_sweep, ScenarioConfig, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "phc-divert",
    version,
    about = "Two-facility childbirth diversion experiments",
    after_help = "Without --config the built-in facility parameters apply; \
                  every flag overrides its config-file counterpart."
)]
struct Cli {
    /// Configuration file, TOML (or JSON, by extension).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Scenario set: none, actual, rst-state, rst-steady, est, or all.
    #[arg(long, value_name = "SET")]
    policy: Option<String>,
    /// Master random seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Replications per scenario.
    #[arg(long, value_name = "N")]
    reps: Option<u32>,
    /// Warm-up length, days.
    #[arg(long, value_name = "N")]
    warmup_days: Option<f64>,
    /// Measured horizon after the warm-up, days.
    #[arg(long, value_name = "N")]
    horizon_days: Option<f64>,
    /// One-way travel time between the facilities, minutes.
    #[arg(long, value_name = "MIN")]
    travel_time: Option<f64>,
    /// Wait threshold for the alpha statistic, minutes.
    #[arg(long, value_name = "MIN")]
    threshold: Option<f64>,
    /// Output directory, replaced on success.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Sensitivity sweep, e.g. ia_childbirth=1440,720 or travel_time=0,60.
    #[arg(long, value_name = "PARAM=V1,V2,...")]
    sweep: Option<String>,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<(), Box<dyn Error>> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(policy) = &cli.policy {
        cfg.policy = policy.parse().map_err(Box::<dyn Error>::from)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = cli.reps {
        cfg.replications = reps;
    }
    if let Some(days) = cli.warmup_days {
        cfg.warmup_days = days;
    }
    if let Some(days) = cli.horizon_days {
        cfg.horizon_days = days;
    }
    if let Some(minutes) = cli.travel_time {
        cfg.travel_time = minutes;
    }
    if let Some(minutes) = cli.threshold {
        cfg.wait_threshold = minutes;
    }
    if let Some(dir) = cli.out {
        cfg.out_dir = dir;
    }

    let output = match &cli.sweep {
        Some(spec) => {
            let sweep: SweepSpec = spec.parse().map_err(Box::<dyn Error>::from)?;
            sensitivity_sweep(&cfg, &sweep)?
        }
        None => run_experiment(&cfg)?,
    };

    for row in &output.rows {
        let alpha = row
            .report
            .alpha
            .map_or_else(|| String::from("-"), |s| format!("{:.4}", s.mean));
        let sweep_tag = row
            .sweep
            .map_or_else(String::new, |(p, v)| format!(" [{p}={v}]"));
        println!(
            "{:<10}{} alpha {} diverted {:.1} served {:.1}",
            row.scenario.name(),
            sweep_tag,
            alpha,
            row.report.diverted.mean,
            row.report.served_childbirth.mean,
        );
    }
    println!("{} files in {}:", output.files.len(), output.out_dir.display());
    for f in &output.files {
        println!("  {}", f.file_name().unwrap_or_default().to_string_lossy());
    }
    Ok(())
}
