//! Command-line front end: `sweep-h`, `sweep-v`, `compare`, `validate` and
//! `sample-heights`.

pub mod commands;
pub mod output;
pub mod settings;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    cmd_compare, cmd_sample_heights, cmd_sweep_h, cmd_sweep_v, cmd_validate, horizontal_statistics,
    random_oracle_run, OracleRun, ScenarioStats, ValidationReport,
};
pub use settings::Settings;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("cannot parse config: {0}")]
    ConfigParse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Model(#[from] crate::Error),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Output consumer went away (e.g. piped into `head`).
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e),
                _ => None,
            },
            _ => None,
        };
        io.is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
    }

    /// 1 for failed checks, 2 for usage and configuration problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleMismatch(_) => 1,
            CliError::Config { .. } | CliError::ConfigParse(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "uav-pathloss",
    version,
    about = "UAV-to-vehicle path loss in ITU-R built-up areas"
)]
pub struct Cli {
    /// Flat TOML file with the same keys as the flags (underscores for dashes)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub settings: Settings,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Path loss along the street at fixed UAV altitude
    SweepH,
    /// Path loss against UAV altitude at fixed horizontal distance
    SweepV,
    /// Pooled path-loss CDFs and normal fits for several presets
    Compare,
    /// Oracle cross-check on random links plus the large-scale statistics run
    Validate,
    /// Draw Rayleigh building heights and fit γ back
    SampleHeights,
}

impl Cli {
    pub fn resolved_settings(&self) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        Ok(base.overlay(self.settings.clone()))
    }
}

fn create(path: &Path) -> Result<Box<dyn Write>, CliError> {
    let f = File::create(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(Box::new(BufWriter::new(f)))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => create(p),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn finish(mut w: Box<dyn Write>, path: Option<&Path>) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::Io {
        path: path
            .map(Path::to_path_buf)
            .unwrap_or_else(|| "<stdout>".into()),
        source: e,
    })
}

/// Runs one command. Diagnostics go to stderr; data goes to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let s = cli.resolved_settings()?;
    let out_path = s.out.as_deref();
    match cli.command {
        Command::SweepH | Command::SweepV => {
            let samples = if cli.command == Command::SweepH {
                cmd_sweep_h(&s)?
            } else {
                cmd_sweep_v(&s)?
            };
            let mut w = open_out(out_path)?;
            output::write_samples(&mut w, &samples)?;
            finish(w, out_path)
        }
        Command::Compare => {
            let stats = cmd_compare(&s)?;
            let mut w = open_out(out_path)?;
            commands::write_compare_ecdf(&mut w, &stats)?;
            finish(w, out_path)?;
            match s.summary.as_deref() {
                Some(p) => {
                    let mut sw = create(p)?;
                    commands::write_compare_summary(&mut sw, &stats)?;
                    finish(sw, Some(p))
                }
                None => commands::write_compare_summary(io::stderr().lock(), &stats),
            }
        }
        Command::Validate => {
            let report = cmd_validate(&s)?;
            let mut w = open_out(out_path)?;
            w.write_all(report.to_text().as_bytes())
                .map_err(|e| CliError::Io {
                    path: out_path
                        .map(Path::to_path_buf)
                        .unwrap_or_else(|| "<stdout>".into()),
                    source: e,
                })?;
            finish(w, out_path)?;
            if report.passed() {
                Ok(())
            } else {
                let detail = report
                    .oracle
                    .first_failure
                    .as_ref()
                    .map(|f| format!("{:?}", f))
                    .unwrap_or_default();
                Err(CliError::OracleMismatch(format!(
                    "{} count and {} length mismatches; first failing link: {detail}",
                    report.oracle.count_mismatches, report.oracle.length_mismatches
                )))
            }
        }
        Command::SampleHeights => {
            let sample = cmd_sample_heights(&s)?;
            let mut w = open_out(out_path)?;
            commands::write_heights(&mut w, &sample)?;
            finish(w, out_path)?;
            eprintln!(
                "gamma = {}, n = {}, gamma_hat = {}",
                output::fmt_sig(sample.gamma),
                sample.heights.len(),
                output::fmt_sig(sample.gamma_hat)
            );
            Ok(())
        }
    }
}
