//! Command-line orchestration for the forgetting and overfitting protocols.
//!
//! Exit codes: 0 on success, 1 when `--check` is given and a check fails,
//! 2 on usage, configuration or run errors.

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub mod config;
pub mod report;
pub mod run;

pub use config::{Cli, Command, Format, LearnerChoice, RunConfig};
pub use report::{emit_report, ExperimentReport, Results};
pub use run::execute;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Run(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<forgetbench_core::Error> for CliError {
    fn from(e: forgetbench_core::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

/// Parses `args` (program name first), runs, writes the report and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_config(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("forgetbench: {e}");
            2
        }
    }
}

fn run_config(cli: Cli) -> Result<i32, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let report = execute(&cfg)?;
    emit_report(&report, cfg.format, cfg.out.as_deref())?;
    if cfg.check && !report.passed() {
        for c in report.failed_checks() {
            eprintln!("forgetbench: check failed: {} ({})", c.name, c.detail);
        }
        return Ok(1);
    }
    Ok(0)
}
