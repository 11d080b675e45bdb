use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cascade_sim::{execute, load_config, write_outputs, CliError, Command, RunManifest};
use clap::Parser;

/// Environment variable that sets the number of worker threads.
const THREADS_ENV: &str = "CASCADE_SIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cascade-sim", version, about = "Coupled credit-rating cascade simulator")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Data file to write; the manifest goes beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Further configuration keys as `key=value`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    for item in &cli.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override `{item}` is not of the form key=value")))?;
        overrides.push((key.trim().to_string(), value.trim().to_string()));
    }
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(realizations) = cli.realizations {
        overrides.push(("realizations".into(), realizations.to_string()));
    }
    if let Some(out) = &cli.out {
        overrides.push(("out".into(), out.display().to_string()));
    }
    let config = load_config(&text, &overrides).map_err(|e| match &cli.config {
        Some(path) => CliError::Usage(format!("{}: {e}", path.display())),
        None => CliError::Config(e),
    })?;

    let started = Instant::now();
    let output = execute(cli.command, &config)?;
    let seconds = started.elapsed().as_secs_f64();

    let data_path = config.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command)));
    let manifest = RunManifest::new(cli.command, &config, &data_path, output.summary.clone(), seconds);
    let manifest_path = write_outputs(&data_path, &output, &manifest)?;
    eprintln!("wrote {} and {}", data_path.display(), manifest_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cascade-sim: error: {e}");
            ExitCode::FAILURE
        }
    }
}
