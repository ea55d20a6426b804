use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thz_link::experiments::{run_preset, ExperimentPreset, PresetName};
use thz_link::{ConfigFile, Error, Execution, ThresholdMode};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Monte Carlo link-level simulator for multi-carrier THz links.
///
/// Set THZ_LINK_WORKERS to pin the worker count (1 runs sequentially).
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// JSON config file. Missing fields take their documented defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_parser = ["fig1", "fig2", "fig3", "fig4", "custom"], default_value = "custom")]
    experiment: String,

    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Overrides the config's trial count.
    #[arg(long)]
    trials: Option<u64>,

    /// Output directory for the CSV and manifest.
    #[arg(long, required_unless_present = "validate_only")]
    out: Option<PathBuf>,

    #[arg(long, value_parser = ["paper", "shannon"])]
    threshold_mode: Option<String>,

    /// Print the resolved config and exit.
    #[arg(long)]
    validate_only: bool,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load(args: &Args) -> Result<(ExperimentPreset, ConfigFile, Execution), Failure> {
    let file = match &args.config {
        Some(path) => ConfigFile::from_path(path).map_err(Failure::Config)?,
        None => ConfigFile::default(),
    };
    let threshold_mode = match &args.threshold_mode {
        Some(m) => Some(m.parse::<ThresholdMode>().map_err(Failure::Config)?),
        None => None,
    };
    let overrides = file.overlay(&ConfigFile {
        seed: args.seed,
        trials: args.trials,
        threshold_mode,
        ..Default::default()
    });
    let name: PresetName = args.experiment.parse().map_err(Failure::Config)?;
    let preset = ExperimentPreset::builtin(name);
    // Surface every config problem before any work starts.
    preset.resolve(&overrides).map_err(Failure::Config)?;
    let exec = Execution::from_env().map_err(Failure::Config)?;
    Ok((preset, overrides, exec))
}

fn run(args: &Args) -> Result<(), Failure> {
    let (preset, overrides, exec) = load(args)?;
    if args.validate_only {
        let resolved = preset.resolve(&overrides)?;
        let echo = serde_json::json!({
            "config": resolved.to_canonical(),
            "resolved": resolved,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&echo).map_err(|e| Failure::Runtime(e.into()))?
        );
        return Ok(());
    }
    let out_dir = args.out.as_deref().expect("clap enforces --out");
    let out = run_preset(&preset, &overrides, exec, Some(out_dir))?;
    for w in &out.warnings {
        log::warn!("{w}");
    }
    if let Some(csv) = &out.csv_path {
        println!("{} ({} rows, {:.1} s)", csv.display(), out.rows, out.wall_time_s);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
