//! Command-line harness around the `graphent` library: entropies of files,
//! graph and signal generation, and seeded parameter sweeps written as CSV.

pub mod commands;
pub mod config;
pub mod sweep;

use graphent::entropy::EntropyError;
use graphent::generators::GeneratorError;
use graphent::io::LoadError;
use graphent::measures::MeasureError;
use graphent::GraphError;
use thiserror::Error;

/// Failure of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Inputs were valid but the computation failed. Exit code 3.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::EmptyRestriction(_) | GraphError::Underflow(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        match e {
            EntropyError::Graph(g) => g.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Graph(g) => g.into(),
            MeasureError::NoConvergence { .. } | MeasureError::ZeroSpectrum => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<GeneratorError> for CliError {
    fn from(e: GeneratorError) -> Self {
        match e {
            GeneratorError::Graph(g) => g.into(),
            GeneratorError::Parameter(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
