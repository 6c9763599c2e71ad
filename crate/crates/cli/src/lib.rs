//! Batch front end: one JSON config in, CSV/JSON payload files and an
//! `envelope.json` run record out.
//!
//! Exit codes: 0 success, 1 config/schema/I-O error, 2 partial row failures,
//! 3 fit failure.

pub mod cli;
pub mod commands;
pub mod config;
pub mod envelope;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use cli::{Cli, Command};
use error::EXIT_INPUT;

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    let threads = cli.command.args().threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_INPUT;
        }
    };
    pool.install(|| execute(&cli.command))
}

pub fn execute(command: &Command) -> i32 {
    let args = command.args();
    match command {
        Command::Fig4(_) => commands::dispatch(command.name(), args, commands::fig4::run),
        Command::Extract(_) => commands::dispatch(command.name(), args, commands::extract::run),
        Command::Synthesize(_) => commands::dispatch(command.name(), args, commands::synthesize::run),
        Command::Twotone(_) => commands::dispatch(command.name(), args, commands::twotone::run),
        Command::Decay(_) => commands::dispatch(command.name(), args, commands::decay::run),
        Command::Fitres(_) => commands::dispatch(command.name(), args, commands::fitres::run),
    }
}
