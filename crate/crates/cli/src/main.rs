//! Command line front end of the `hyperdefect` library.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

/// Failure classes, mapped to exit codes 1 (computation) and 2 (usage).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Library(#[from] hyperdefect::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Library(hyperdefect::Error::Domain(_) | hyperdefect::Error::Parse(_)) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::resolve(&cli).and_then(|cfg| {
        if let Some(w) = cfg.workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build_global()
                .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
        }
        commands::run(&cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
