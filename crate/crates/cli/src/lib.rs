//! Command-line front end: generate benchmarks, simulate datasets, fit the
//! linear baseline, train region discriminators, evaluate and compare them,
//! and run complete multi-day studies.
//!
//! Exit codes are `0` on success, `2` for argument or validation errors and
//! `3` for data or model errors. Failures print one line to stderr of the
//! form `error(<code>): <reason>`.

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

mod args;
mod commands;
pub mod plan;
pub mod report;
pub mod study;

pub use args::Cli;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;

/// A command failure with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    pub fn data(message: impl fmt::Display) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = self
            .message
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        write!(f, "error({}): {}", self.code, line)
    }
}

impl std::error::Error for Failure {}

pub(crate) trait OrFail<T> {
    fn or_usage(self) -> Result<T, Failure>;
    fn or_data(self) -> Result<T, Failure>;
}

impl<T, E: fmt::Display> OrFail<T> for Result<T, E> {
    fn or_usage(self) -> Result<T, Failure> {
        self.map_err(Failure::usage)
    }

    fn or_data(self) -> Result<T, Failure> {
        self.map_err(Failure::data)
    }
}

/// Parse `args` (program name first) and execute the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let reason = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("{}", Failure::usage(reason));
            return EXIT_USAGE;
        }
    };
    match commands::execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.code
        }
    }
}
