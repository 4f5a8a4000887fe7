use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anisons::config::Command;
use anisons::error::{AppError, EXIT_OK};
use anisons::{run, ExperimentConfig, RunOptions};
use clap::Parser;

/// Batch runs of the anisotropic Navier-Stokes toolkit.
///
/// Exit codes: 0 ok, 1 IO failure, 2 config error, 3 solver abort,
/// 4 verification failure.
#[derive(Parser, Debug)]
#[command(name = "anisons", version)]
struct Cli {
    /// Overrides the config's command.
    command: Option<Command>,
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps and verifier suites.
    #[arg(long, env = "ANISONS_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, AppError> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| AppError::config("", format!("{}: {e}", p.display())))?;
            let base = p.parent().unwrap_or(Path::new("."));
            ExperimentConfig::from_json(&text, base).map_err(AppError::Config)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(c) = cli.command {
        cfg.command = c;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.threads == Some(0) {
        return Err(AppError::config("", "--threads must be at least 1"));
    }
    cfg.validate().map_err(AppError::Config)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| run(&cfg, &RunOptions { threads: cli.threads, quiet: cli.quiet }));
    match result {
        Ok(_) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("anisons: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
