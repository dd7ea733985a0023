//! `wgnls`: runs experiments described by a config file.
//!
//! Exit codes: 0 success, 1 I/O, 2 invalid config, 3 mass reached the
//! boundary layer, 4 non-finite state, 5 under-resolved grid, 6 other
//! numerical failure. `WGNLS_WORKERS` caps the worker threads.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wgnls::probes::schedule::parse_exponent;
use wgnls::probes::imethod_schedule;

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "wgnls", version, about = "Cubic NLS simulator and probe suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Parse and check a config file without computing anything.
    Validate { config: PathBuf },
    /// Print the exponent schedule for regularity `s` and frequency `N`.
    Schedule {
        #[arg(long)]
        s: String,
        #[arg(long)]
        n: f64,
    },
    /// Print the version.
    Version,
}

fn init_workers() -> CliResult<()> {
    let Ok(text) = std::env::var("WGNLS_WORKERS") else {
        return Ok(());
    };
    let workers: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| CliError::Validation(format!("WGNLS_WORKERS = {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { config } => {
            init_workers()?;
            let cfg = config::parse_config(&config)?;
            let summary = run::run(&cfg)?;
            for f in &summary.files {
                println!("{}", f.display());
            }
            println!("{}", summary.output.join(output::MANIFEST).display());
        }
        Command::Validate { config } => {
            let cfg = config::parse_config(&config)?;
            println!("{}", serde_json::to_string_pretty(&cfg).expect("serializable"));
        }
        Command::Schedule { s, n } => {
            let s = parse_exponent(&s).map_err(|e| CliError::Validation(e.to_string()))?;
            let sched = imethod_schedule(s, n)?;
            sched.require_global()?;
            println!("{}", serde_json::to_string_pretty(&sched).expect("serializable"));
        }
        Command::Version => println!("wgnls {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
