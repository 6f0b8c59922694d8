//! Reproduction harness for the `deltatrain` library.
//!
//! Settings come from built-in defaults, then an optional `--config` file of
//! `key = value` lines, then command-line flags. Exit codes: 0 on success, 1
//! for configuration errors, 2 for numerical or output failures.

pub mod config;
pub mod output;
pub mod run;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{Command, RawConfig, RunConfig, Violation};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", list(.0))]
    Config(Vec<Violation>),
    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: deltatrain::Error,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn list(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical { .. } | CliError::Output { .. } => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "deltatrain",
    version,
    about = "Delta-train memory-equation harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Qubit transfer function at T for a sweep of node counts.
    JcConverge(Flags),
    /// Qubit decay rates and RHP measure for arc-span restrictions.
    JcDecay(Flags),
    /// Oscillator response G(T) for a sweep of node counts.
    QleConverge(Flags),
    /// Thermal position variance against the continuum reference.
    QleCovariance(Flags),
    /// Diagram-by-diagram expansion of a small train.
    Diagrams(Flags),
}

/// Every flag is optional; a subcommand rejects keys it does not use.
#[derive(Debug, Args, Default)]
pub struct Flags {
    /// File of `key = value` settings, overridden by flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "kappa-over-lambda", allow_hyphen_values = true)]
    pub kappa_over_lambda: Option<String>,
    #[arg(long = "lambda-T", allow_hyphen_values = true)]
    pub lambda_t: Option<String>,
    #[arg(long = "kappa-over-omega", allow_hyphen_values = true)]
    pub kappa_over_omega: Option<String>,
    #[arg(long = "lambda-over-omega", allow_hyphen_values = true)]
    pub lambda_over_omega: Option<String>,
    #[arg(long = "omega-T", allow_hyphen_values = true)]
    pub omega_t: Option<String>,
    /// Inverse temperature in units of the inverse scale frequency.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Node counts: `10,30,100` or a range `10..2000`.
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Arc-span restrictions, e.g. `1,2,full`.
    #[arg(long)]
    pub j: Option<String>,
    /// `constant`, or a file with one switching amplitude per line.
    #[arg(long)]
    pub chi: Option<String>,
    /// Number of evenly spaced output times.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    /// Thermal units of the sampled noise: `physical` or `literal`.
    #[arg(long)]
    pub units: Option<String>,
    /// `jc` or `qle`.
    #[arg(long)]
    pub model: Option<String>,
    /// `csv` or `json`.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("kappa-over-lambda", self.kappa_over_lambda.clone()),
            ("lambda-T", self.lambda_t.clone()),
            ("kappa-over-omega", self.kappa_over_omega.clone()),
            ("lambda-over-omega", self.lambda_over_omega.clone()),
            ("omega-T", self.omega_t.clone()),
            ("beta", self.beta.clone()),
            ("N", self.n.clone()),
            ("j", self.j.clone()),
            ("chi", self.chi.clone()),
            ("points", self.points.clone()),
            ("q0", self.q0.clone()),
            ("p0", self.p0.clone()),
            ("units", self.units.clone()),
            ("model", self.model.clone()),
            ("format", self.format.clone()),
            ("output", self.output.clone()),
        ]
    }
}

impl Sub {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Sub::JcConverge(f) => (Command::JcConverge, f),
            Sub::JcDecay(f) => (Command::JcDecay, f),
            Sub::QleConverge(f) => (Command::QleConverge, f),
            Sub::QleCovariance(f) => (Command::QleCovariance, f),
            Sub::Diagrams(f) => (Command::Diagrams, f),
        }
    }
}

/// Layers defaults, file and flags, then validates.
pub fn resolve(sub: &Sub) -> Result<RunConfig, CliError> {
    let (command, flags) = sub.split();
    let given: Vec<_> = flags
        .pairs()
        .into_iter()
        .filter(|(_, v)| v.is_some())
        .collect();
    let stray: Vec<Violation> = given
        .iter()
        .filter(|(k, _)| !command.keys().contains(k))
        .map(|(k, _)| Violation {
            field: k.to_string(),
            constraint: format!("not a setting of {}", command.name()),
        })
        .collect();
    if !stray.is_empty() {
        return Err(CliError::Config(stray));
    }
    let raw =
        RawConfig::layered(command, flags.config.as_deref(), &given).map_err(CliError::Config)?;
    RunConfig::from_raw(&raw).map_err(CliError::Config)
}

/// Resolves, runs and writes one subcommand; returns the rendered output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = resolve(&cli.command)?;
    let text = run::execute(&cfg)?.render(cfg.format);
    match &cfg.output {
        Some(path) => {
            fs::write(path, &text).map_err(|source| CliError::Output {
                path: path.clone(),
                source,
            })?;
        }
        None => print!("{text}"),
    }
    Ok(text)
}
