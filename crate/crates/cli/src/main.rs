mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;
use phonolint_core::Error;

use args::{Cli, Command};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. }
        | Error::MissingColumn { .. }
        | Error::DuplicateRow { .. }
        | Error::Validation { .. }
        | Error::Tokenize { .. }
        | Error::NoNucleus { .. }
        | Error::Config { .. } => EXIT_VALIDATION,
        Error::Usage(_) => EXIT_USAGE,
        Error::DegenerateModel { .. }
        | Error::EmptyAggregation
        | Error::Convergence { .. }
        | Error::Evaluation(_) => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
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

    let result = match &cli.command {
        Command::Validate(a) => {
            commands::validate(a).map(|clean| if clean { 0 } else { EXIT_VALIDATION })
        }
        Command::Score(a) => commands::score(a).map(|()| 0),
        Command::Grid(a) => commands::grid(a).map(|()| 0),
        Command::Fixture(a) => commands::fixture(a).map(|()| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("phonolint: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
