//! Command-line front end for `sosgibbs`.
//!
//! Exit codes: 0 success, 1 solver or contract error, 2 usage error,
//! 3 regime error (quantity does not exist at these parameters), 4 I/O error.

pub mod args;
pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;
use sosgibbs::{RootFindConfig, SosError};

use args::{Cli, Command, Format, OutputArgs, ScanArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] SosError),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(SosError::Regime(_) | SosError::Degenerate(_)) => EXIT_REGIME,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(_) | CliError::Json(_) => EXIT_FAILURE,
        }
    }
}

pub fn scan_config(scan: &ScanArgs) -> RootFindConfig {
    let mut cfg = RootFindConfig::default();
    if let Some((lo, hi, points)) = scan.scan {
        cfg = cfg.with_window(lo, hi, points);
    }
    if let Some(tol) = scan.tol {
        cfg.tol_residual = tol;
    }
    cfg
}

/// Resolves the output format against what a command supports.
pub fn pick_format(output: &OutputArgs, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = output.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(CliError::Usage(format!("format {f:?} is not available for this command")));
    }
    Ok(f)
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

/// Runs a parsed command and returns the rendered report.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Criticals(a) => commands::criticals::run(a),
        Command::Solve(a) => commands::solve::run(a),
        Command::Sweep(a) => commands::sweep::run(a),
        Command::VerifyTree(a) => commands::verify::run(a),
    }
}

fn output_of(cli: &Cli) -> &OutputArgs {
    match &cli.command {
        Command::Criticals(a) => &a.output,
        Command::Solve(a) => &a.output,
        Command::Sweep(a) => &a.output,
        Command::VerifyTree(a) => &a.output,
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|text| emit(output_of(&cli), &text)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
