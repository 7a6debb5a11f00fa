//! `qwalk`: fit split-step quantum walks to target distributions, price
//! European calls on the result, and run plain DTQW demonstrations.

mod args;
mod artifacts;
mod commands;
mod plot;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit code for bad input: arguments, data files, domain checks.
const EXIT_VALIDATION: u8 = 1;
/// Exit code for failures that are not the caller's fault.
const EXIT_INTERNAL: u8 = 2;

/// Error carrying the exit code it should map to.
#[derive(Debug)]
pub enum CliError {
    Validation(anyhow::Error),
    Internal(anyhow::Error),
}

impl CliError {
    pub fn validation(e: impl Into<anyhow::Error>) -> Self {
        CliError::Validation(e.into())
    }

    pub fn internal(e: impl Into<anyhow::Error>) -> Self {
        CliError::Internal(e.into())
    }
}

/// Library errors are validation failures except a non-finite objective,
/// which points at a numerical bug rather than bad input.
impl From<qwalk_core::Error> for CliError {
    fn from(e: qwalk_core::Error) -> Self {
        match e {
            qwalk_core::Error::NonFinite { .. } => CliError::Internal(e.into()),
            _ => CliError::Validation(e.into()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.parallel {
        if threads == 0 {
            return Err(CliError::validation(anyhow::anyhow!(
                "--parallel needs at least one thread"
            )));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(CliError::internal)?;
    }
    match &cli.command {
        Command::Run(cmd) => commands::execute(cmd, cli.seed, &cli.out, cli.ascii),
        Command::Replay(r) => commands::replay(r, &cli.out, cli.ascii),
    }
}
