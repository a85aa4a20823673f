use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vortex_cli::{commands, parse_config, CliError, RunConfig};

/// Steady vortex of a rotating cylinder over a plane.
#[derive(Parser)]
#[command(name = "vortex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the steady Navier-Stokes problem and write fields and diagnostics.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the swirl Stokes state for the configured boundary data.
    Stokes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the double free-slip swirl solve with circular Couette flow.
    Couette {
        #[arg(long)]
        config: PathBuf,
    },
    /// Manufactured-solution convergence study starting at the configured grid.
    Mms {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        config: PathBuf,
    },
    /// Repeat `solve` over values of one config key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `key=v1,v2,...`, key as `section.key` or unique key name.
        #[arg(long)]
        vary: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the diagnostics report of a field file.
    Diag {
        #[arg(long)]
        field: PathBuf,
    },
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Solve { config, out } => commands::solve(&load(&config)?, &out),
        Command::Stokes { config, out } => commands::stokes(&load(&config)?, &out),
        Command::Couette { config } => commands::couette(&load(&config)?),
        Command::Mms { levels, config } => commands::mms(&load(&config)?, levels),
        Command::Sweep { config, vary, out } => {
            let (key, values) = vary
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--vary expects key=v1,v2,..., got '{vary}'")))?;
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
            commands::sweep(&load(&config)?, key.trim(), &values, &out)
        }
        Command::Diag { field } => commands::diag(&field),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
