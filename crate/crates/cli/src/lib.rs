//! Batch front end: configuration, output files and exit codes.

// `!(x > 0.0)` is the NaN-rejecting form used throughout the checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;
use log::{error, info};
use vortex_core::Error;

pub use config::{Command, RunConfig};
use output::OutDir;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {}", .0.display(), .1)]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_VALIDATION,
            CliError::Io(..) => EXIT_NUMERICAL,
            CliError::Core(e) => core_exit_code(e),
        }
    }

    /// Name of the pipeline stage that failed, if the error carries one.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            CliError::Core(Error::Stage { stage, .. }) => Some(stage),
            _ => None,
        }
    }
}

fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::Stage { source, .. } => core_exit_code(source),
        Error::InvalidParameter(_)
        | Error::Construction(_)
        | Error::ClassViolation(_)
        | Error::ParameterMismatch(_)
        | Error::SingularPotential { .. }
        | Error::Json(_) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "vortex", version, about = "Unstable radial vortices: profiles, spectra, dispersion branches")]
pub struct Cli {
    /// Command to run; defaults to `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML run configuration; every field has a default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created when missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `profile.alpha`.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Saved profile document, overriding `profile_file`.
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

/// Resolves the configuration from the file and the flags.
pub fn resolve(cli: &Cli) -> Result<(Command, RunConfig), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(a) = cli.alpha {
        cfg.profile.alpha = a;
    }
    if let Some(p) = &cli.profile {
        cfg.profile_file = Some(p.clone());
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    let cmd = cli
        .command
        .or(cfg.command)
        .ok_or_else(|| CliError::Config("no command given on the command line or in the config".into()))?;
    cfg.command = Some(cmd);
    if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from(format!("vortex-{}", cmd.name())));
    }
    cfg.validate()?;
    Ok((cmd, cfg))
}

/// Runs the CLI and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let (cmd, cfg) = match resolve(cli) {
        Ok(x) => x,
        Err(e) => {
            error!("{e}");
            return e.exit_code();
        }
    };
    let root = cfg.out.clone().expect("resolved");
    let mut out = match OutDir::open(&root, cmd.name()) {
        Ok(o) => o,
        Err(e) => {
            error!("{e}");
            return e.exit_code();
        }
    };
    info!("{} -> {}", cmd.name(), root.display());
    let result = commands::run(cmd, &cfg, &mut out);
    match result {
        Ok(warnings) => match out.finish() {
            Ok(files) => {
                info!("wrote {}", files.join(", "));
                if !warnings.is_empty() {
                    info!("finished with {} warning(s)", warnings.len());
                }
                EXIT_OK
            }
            Err(e) => {
                error!("{e}");
                e.exit_code()
            }
        },
        Err(e) => {
            out.fail(&e);
            match e.stage() {
                Some(stage) => error!("{} failed in stage `{stage}`: {e}", cmd.name()),
                None => error!("{} failed: {e}", cmd.name()),
            }
            e.exit_code()
        }
    }
}
