//! Laplacian spectra, smoothness and centrality measures.

mod centrality;
mod spectrum;

use thiserror::Error;

use crate::graph::GraphError;

pub use centrality::{centrality, CentralityKind, CentralityOptions};
pub use spectrum::{
    laplacian_spectrum, laplacian_spectrum_with_limit, normalized_smoothness, smoothness, Spectrum, DEFAULT_DENSE_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("{n} vertices exceed the dense eigensolver limit of {limit}; use a smaller graph (a few thousand vertices at most)")]
    TooLarge { n: usize, limit: usize },
    #[error("graph has no edges, so its Laplacian spectrum is identically zero")]
    ZeroSpectrum,
    #[error("eigenvector index {index} out of range for {n} eigenpairs")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("{0} centrality requires a connected graph")]
    Disconnected(&'static str),
    #[error("{kind} centrality did not converge in {iterations} iterations")]
    NoConvergence { kind: &'static str, iterations: usize },
    #[error("unknown centrality `{0}`")]
    UnknownCentrality(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
