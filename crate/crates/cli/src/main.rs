mod args;
mod commands;
mod reproduce;

use std::process::ExitCode;

use clap::Parser;
use permstat_core::Error;

use args::{Cli, Command};

/// Result of a command that ran to completion.
pub enum Outcome {
    Holds,
    Fails,
}

pub enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stat(c) => commands::stat(c),
        Command::Check(c) => commands::check(c),
        Command::Algebra(c) => commands::algebra(c),
        Command::Qsym(c) => commands::qsym(c),
        Command::Search(c) => commands::search(c),
        Command::Reproduce(c) => reproduce::run(c),
    };
    match result {
        Ok(Outcome::Holds) => ExitCode::SUCCESS,
        Ok(Outcome::Fails) => ExitCode::from(1),
        Err(Failure::Core(e @ (Error::IncompatibleStatistic { .. } | Error::NotARefinement { .. }))) => {
            commands::emit(&serde_json::json!({
                "schema": permstat_core::stat::SCHEMA,
                "holds": false,
                "reason": e.to_string(),
            }));
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
