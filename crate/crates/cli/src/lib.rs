//! Command-line front end: argument parsing, layered configuration, run
//! manifests and the JSON/CSV report writers.

pub mod angle;
pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod report;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::FileConfig;
use crate::error::{CliResult, EXIT_OK, EXIT_USAGE};

pub fn run(cli: &Cli) -> CliResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Theory(a) => commands::theory(a),
        Command::Sweep(a) => commands::sweep(a, &file),
        Command::Analyze(a) => commands::analyze_cmd(a, &file),
        Command::Protocol(a) => commands::protocol(a, &file),
        Command::Optimize(a) => commands::optimize(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
