//! Seeded synthetic graphs and graph-signal processes.
//!
//! Every generator takes its randomness from a caller-supplied [`rand::Rng`];
//! [`SeedSequence`] derives reproducible, platform-independent streams from a
//! master seed.

mod graphs;
mod seed;
mod signals;

use thiserror::Error;

use crate::graph::GraphError;

pub use graphs::{cycle, directed_path, path, rgg, star, watts_strogatz, GeometricGraph, IsolatedPolicy, RggOptions};
pub use seed::{SeedSequence, StreamRng};
pub use signals::{
    logistic_signal, mix_signal, sine_signal, uniform_signal, wiener_increments, wiener_signal, LogisticParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("random geometric graph still had an isolated vertex after {0} attempts")]
    IsolatedAfterRetries(usize),
    #[error("pruning isolated vertices left fewer than two vertices")]
    NothingLeft,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub(crate) fn param(ok: bool, message: impl FnOnce() -> String) -> Result<(), GeneratorError> {
    if ok {
        Ok(())
    } else {
        Err(GeneratorError::Parameter(message()))
    }
}
