use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use frontlab::harness::{load_config, run_experiment, HarnessError, LoadedConfig, OutputSink, RunConfig, EXPERIMENTS};

#[derive(Parser)]
#[command(name = "frontlab", version, about = "Bistable fronts in heterogeneous media")]
struct Cli {
    /// One of: wave, gap, run1d, run2d, supersol, entire1d, entire2d, threshold, blocking, accept.
    experiment: String,
    /// JSON run configuration; all defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, or the main output file when it ends in .csv or .json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(cli: &Cli) -> Result<LoadedConfig, HarnessError> {
    let mut loaded = match &cli.config {
        Some(path) => load_config(path)?,
        None => LoadedConfig::new(RunConfig::default())?,
    };
    if let Some(seed) = cli.seed {
        let mut config = loaded.config.clone();
        config.seed = seed;
        loaded = LoadedConfig::new(config)?;
    }
    Ok(loaded)
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    if !EXPERIMENTS.contains(&cli.experiment.as_str()) {
        return Err(HarnessError::UnknownExperiment(cli.experiment.clone()));
    }
    let loaded = load(cli)?;
    let mut sink = match &cli.out {
        Some(target) => OutputSink::from_target(target),
        None => OutputSink::new(&loaded.config.outputs.directory),
    };
    let record = run_experiment(&loaded, &cli.experiment, &mut sink)?;
    if let Some(criteria) = record.summary.get("criteria").and_then(|c| c.as_array()) {
        for c in criteria {
            let verdict = if c["pass"] == true { "PASS" } else { "FAIL" };
            eprintln!("[{verdict}] {:>2} {}: {}", c["id"], c["name"].as_str().unwrap_or(""), c["detail"].as_str().unwrap_or(""));
        }
    }
    println!("{}", serde_json::to_string_pretty(&record).expect("record serialises"));
    Ok(record.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(&cli).unwrap_or_else(|e| {
        eprintln!("frontlab: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
