//! Command-line front end for `lommel-core`: evaluation, zero tables,
//! inequality verification and scans, written as CSV, JSON or text.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 convergence failure,
//! 4 a check ran and failed, 5 output could not be written.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{lab_for, precision_of, Context, Status};
use crate::config::ConfigFile;
use crate::error::{exit, CliError, Result};
use crate::format::{Format, Sink, OUT_DIR_ENV};

/// Parses `args` and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match execute(&cli) {
        Ok(Status::Pass) => exit::OK,
        Ok(Status::Fail) => exit::CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<Status> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::Eval(a) => commands::eval(a, &ctx),
        Command::Zeros(a) => commands::zeros(a, &ctx),
        Command::Verify(a) => commands::verify(a, &ctx),
        Command::Scan(s) => commands::scan(s, &ctx),
    }
}

fn context(cli: &Cli) -> Result<Context> {
    let c = &cli.common;
    let config = match &c.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let out = config.pick(c.out.clone(), "out", |s| Some(PathBuf::from(s)))?;
    let explicit = config.pick(c.format, "format", Format::parse)?;
    let implied = out.as_deref().and_then(Format::from_path);
    let format = match (explicit, implied) {
        (Some(f), Some(g)) if f != g => {
            return Err(CliError::usage(format!(
                "--format {f:?} conflicts with the extension of {}",
                out.as_deref().map(|p| p.display().to_string()).unwrap_or_default()
            )
            .to_lowercase()));
        }
        (Some(f), _) => f,
        (None, Some(g)) => g,
        (None, None) => Format::Pretty,
    };
    let threads = config.pick(c.threads, "threads", |s| s.parse::<u64>().ok().filter(|n| *n >= 1))?;
    let precision = config.pick(c.precision, "precision", |s| match s {
        "working" => Some(args::PrecisionArg::Working),
        "extended" => Some(args::PrecisionArg::Extended),
        _ => None,
    })?;
    let precision = precision_of(precision.unwrap_or(args::PrecisionArg::Working));
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    Ok(Context {
        format,
        sink: Sink::resolve(out.as_deref(), out_dir.as_deref()),
        precision,
        lab: lab_for(precision),
        map: parallel::RayonMap::new(threads.map(|n| n as usize))?,
        config,
    })
}
