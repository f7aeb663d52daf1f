//! Batch pipelines behind the `softwg` binary.
//!
//! Every experiment reads a [`RunConfig`], returns a serialisable report and
//! can emit it as JSON or CSV. Floats in CSV carry 17 significant digits, so
//! identical inputs give byte-identical files.

pub mod config;
mod spectrum;
mod sweep;
mod transverse;
mod variational;

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

pub use config::RunConfig;
pub use spectrum::{cmd_spectrum, dump_matrix, LevelRow, SpectrumReport};
pub use sweep::{cmd_sweep, SweepReport, SweepRow};
pub use transverse::{cmd_transverse, DoubleWellRow, TransverseReport};
pub use variational::{cmd_variational, CertificateReport, FormRow, LimitReport, VariationalReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Solver(_) => 3,
            Self::Output(_) => 1,
        }
    }
}

/// Exit code for a report whose refinement levels disagree beyond `tol`.
pub const EXIT_NOT_CONVERGED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Transverse,
    Variational,
    Spectrum,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Diagnostics sink; messages go to stderr when verbose.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context {
    pub verbose: bool,
}

impl Context {
    pub fn note(&self, msg: &str) {
        if self.verbose {
            eprintln!("{msg}");
        }
    }
}

/// `x` with 17 significant digits; `inf`, `-inf`, `nan` spelled out.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub trait Report: Serialize {
    fn csv_header(&self) -> Vec<String>;
    fn csv_rows(&self) -> Vec<Vec<String>>;

    /// Exit status the binary should finish with after emitting.
    fn exit_code(&self) -> i32 {
        0
    }
}

pub fn emit<R: Report, W: Write>(report: &R, format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report)
                .map_err(|e| CliError::Output(e.into()))?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(report.csv_header())
                .map_err(|e| CliError::Output(e.into()))?;
            for row in report.csv_rows() {
                w.write_record(row).map_err(|e| CliError::Output(e.into()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Runs `experiment`, writes the report, and returns the exit status.
pub fn run<W: Write>(
    experiment: Experiment,
    cfg: &RunConfig,
    format: Format,
    out: W,
    ctx: &Context,
) -> Result<i32, CliError> {
    match experiment {
        Experiment::Transverse => finish(&cmd_transverse(cfg, ctx)?, format, out),
        Experiment::Variational => finish(&cmd_variational(cfg, ctx)?, format, out),
        Experiment::Spectrum => finish(&cmd_spectrum(cfg, ctx)?, format, out),
        Experiment::Sweep => finish(&cmd_sweep(cfg, ctx)?, format, out),
    }
}

fn finish<R: Report, W: Write>(report: &R, format: Format, out: W) -> Result<i32, CliError> {
    emit(report, format, out)?;
    Ok(report.exit_code())
}
