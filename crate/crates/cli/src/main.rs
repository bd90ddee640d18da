use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use helmrecon_cli::{execute, CliError, Command, ExperimentConfig, Mode, Overrides};

/// Reconstruct a potential from synthetic boundary data at large wavenumber.
///
/// Exit codes: 0 success, 1 i/o failure, 2 invalid configuration or violated
/// hypothesis, 3 solver or geometry failure, 4 truncation beyond the sampled band.
#[derive(Debug, Parser)]
#[command(name = "helmrecon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML experiment file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    /// Relative noise level added to every boundary trace.
    #[arg(long, global = true)]
    noise: Option<f64>,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    config.apply(&Overrides {
        out: cli.out.clone(),
        workers: cli.workers,
        seed: cli.seed,
        mode: cli.mode,
        noise: cli.noise,
    })?;
    let manifest = execute(cli.command, &config)?;
    eprintln!("[helmrecon] wrote {} files to {}", manifest.outputs.len() + 1, config.output.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("helmrecon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
