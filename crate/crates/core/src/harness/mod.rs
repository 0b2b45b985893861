//! Configuration, the experiment registry, file output and the acceptance
//! suite behind the `frontlab` command.

pub mod acceptance;
mod config;
mod experiments;
mod output;

pub use config::*;
pub use experiments::*;
pub use output::*;

use std::path::Path;

use thiserror::Error;

use crate::model::ModelError;
use crate::sim1d::SimError;
use crate::sim2d::Sim2DError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid {path}: {message}")]
    Validation { path: String, message: String },
    #[error("unknown experiment `{0}`; expected one of {list}", list = EXPERIMENTS.join(", "))]
    UnknownExperiment(String),
    #[error("{experiment}: numerical failure under {path}: {message}")]
    Numerical { experiment: String, path: String, message: String },
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    pub fn validation(path: &str, message: impl ToString) -> Self {
        HarnessError::Validation { path: path.into(), message: message.to_string() }
    }

    pub fn io(path: &Path, e: impl ToString) -> Self {
        HarnessError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    fn from_model(path: &str, e: ModelError) -> Self {
        match e {
            ModelError::Nonlinearity(_) => Self::validation(path, e),
            _ => HarnessError::Numerical { experiment: "load".into(), path: path.into(), message: e.to_string() },
        }
    }

    fn from_sim(experiment: &str, path: &str, e: SimError) -> Self {
        if e.is_numerical() {
            HarnessError::Numerical { experiment: experiment.into(), path: path.into(), message: e.to_string() }
        } else {
            Self::validation(path, e)
        }
    }

    fn from_sim2d(experiment: &str, path: &str, e: Sim2DError) -> Self {
        if e.is_numerical() {
            HarnessError::Numerical { experiment: experiment.into(), path: path.into(), message: e.to_string() }
        } else {
            Self::validation(path, e)
        }
    }

    /// Process exit status: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Validation { .. } | HarnessError::UnknownExperiment(_) => 2,
            HarnessError::Numerical { .. } => 3,
            HarnessError::Io { .. } => 1,
        }
    }
}

/// Exit status of a failed acceptance suite.
pub const EXIT_ACCEPTANCE_FAILED: i32 = 4;
