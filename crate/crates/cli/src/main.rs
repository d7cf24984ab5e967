//! `spart-lab`: command line front end for S-part experiments.
//!
//! Every run prints a versioned JSON document (or CSV table) carrying a
//! manifest of its parameters and input hashes. Exit codes: 0 on success, 2 on
//! invalid input or usage, 3 when a budget runs out.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Why a run failed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(spart_core::Error),
    Write(std::io::Error),
}

impl From<spart_core::Error> for Failure {
    fn from(e: spart_core::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_budget() => 3,
            Failure::Usage(_) | Failure::Lib(_) => 2,
            Failure::Write(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Write(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spart-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
