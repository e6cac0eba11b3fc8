use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] stm_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Parse(String),

    #[error("{0} check(s) failed")]
    Verify(usize),
}

#[derive(Serialize)]
struct Report<'a> {
    error: Body<'a>,
}

#[derive(Serialize)]
struct Body<'a> {
    kind: &'a str,
    message: String,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Core(e) => match e {
                stm_core::Error::InvalidParam { .. } => "invalid-parameter",
                stm_core::Error::EmptyGrid | stm_core::Error::UnorderedGrid(_) => "grid",
                stm_core::Error::Pole { .. } => "pole",
                stm_core::Error::NoIsolationPoint | stm_core::Error::InconsistentRoot { .. } => "no-solution",
                stm_core::Error::NoConvergence(_) | stm_core::Error::Divergence { .. } => "no-convergence",
                stm_core::Error::Unsupported(_) => "unsupported",
            },
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
            CliError::Verify(_) => "verify",
        }
    }

    /// Usage and config mistakes exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let r = Report { error: Body { kind: self.kind(), message: self.to_string() } };
        serde_json::to_string(&r).expect("plain strings serialize")
    }
}

pub fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing required flag --{flag}"))
}
