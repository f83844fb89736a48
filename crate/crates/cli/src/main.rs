//! `threshold-lab`: thresholds, covers, fragmentation runs, and series
//! certificates for monotone set systems, from the command line.
//!
//! Every command emits one JSON report (or a flat CSV projection) that
//! embeds the resolved configuration and the artifact version, so runs are
//! replayable from their own output. Exit codes: 0 success, 2 validation
//! error, 3 enumeration cap exceeded, 4 failed `--assert`.

mod args;
mod commands;
mod output;
mod spec_parse;

use clap::Parser;

use threshold_lab::Error as CoreError;

fn main() {
    let cli = args::Cli::parse();
    match commands::run(&cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

/// CLI failure with its process exit code.
#[derive(Debug)]
pub enum AppError {
    Core(CoreError),
    Validation(String),
    AssertFailed(String),
    Io(std::io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(CoreError::CapExceeded { .. }) => 3,
            AppError::Core(_) | AppError::Validation(_) | AppError::Io(_) => 2,
            AppError::AssertFailed(_) => 4,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Validation(msg) => write!(f, "{msg}"),
            AppError::AssertFailed(msg) => write!(f, "assertion failed: {msg}"),
            AppError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

pub type AppResult<T> = Result<T, AppError>;
