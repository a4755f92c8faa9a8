//! Front end for `shrinker-core`: configuration, orchestration and artifact emission.

pub mod commands;
pub mod config;
pub mod emit;
pub mod svg;

use std::fmt;
use std::path::PathBuf;

use shrinker_core::GeomError;

pub use config::{Cli, Command, ConfigError, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical { op: &'static str, source: GeomError },
    Io(std::io::Error),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything raised while computing or writing.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numerical { op, source } => write!(f, "{op} failed: {source}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let config = RunConfig::from_cli(cli)?;
    let formats = config.formats()?;
    let execute = || -> Result<Outcome, CliError> {
        let mut out = emit::Writer::new(&config.out_dir(), formats, emit::Provenance::new(&config))?;
        let p = &config.params;
        let lines = match config.command {
            Command::Frames => commands::frames(p, &mut out)?,
            Command::Identities => commands::identities(p, &mut out)?,
            Command::Omission => commands::omission(p, &mut out)?,
            Command::Spiral => commands::spiral(p, &mut out)?,
            Command::Canonical => commands::canonical(p, &mut out)?,
        };
        Ok(Outcome { lines, files: out.written })
    };
    match config.threads()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(config::bad("threads", e.to_string())))?
            .install(execute),
        None => execute(),
    }
}
