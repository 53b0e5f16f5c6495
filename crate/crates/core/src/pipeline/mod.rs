//! End-to-end runs: point cloud -> graph -> embedding, classically or through
//! the simulated quantum path, plus comparison and report files.
//!
//! The quantum run locates eigenvalues from the exact phase-estimation
//! distribution of the mixed input (Way 1), then marks each selected bin and
//! amplifies it (Way 2) to isolate the eigenvector. Locating the spectrum this
//! way is scaffolding: it is what a simulator can afford, not a claim about
//! hardware cost.

mod classical;
mod compare;
mod config;
mod quantum;
mod report;

use thiserror::Error;

use crate::chain::ChainError;
use crate::dataset::DatasetError;
use crate::eigenmap::EigenmapError;
use crate::graph::GraphError;
use crate::qsim::QsimError;

pub use classical::{load_dataset, run_classical_embed, ClassicalRun};
pub use compare::{compare_embeddings, ColumnComparison, ComparisonReport};
pub use config::{
    DataSource, KernelChoice, OutputFormat, RunConfig, Way2Input, DEFAULT_DIMS, DEFAULT_K,
    DEFAULT_PHASE_BITS, DEFAULT_TOL, MAX_PHASE_BITS, MAX_QUANTUM_NODES,
};
pub use quantum::{
    quantum_embed_bundle, run_quantum_embed, EigenRow, OutcomeRow, QuantumDiagnostics,
    QuantumEmbedding, QuantumRun,
};
pub use report::{
    classical_diagnostics_json, embedding_json, load_embedding, quantum_diagnostics_json,
    sidecar_path, write_embedding, Timings,
};

/// How a failure should be reported to a caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or combinations of parameters.
    Config,
    /// Unreadable or malformed input files, or unwritable outputs.
    Input,
    /// A stage of the computation failed on valid input.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("dataset: {0}")]
    Dataset(#[from] DatasetError),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("eigenmap: {0}")]
    Eigenmap(#[from] EigenmapError),
    #[error("chain: {0}")]
    Chain(#[from] ChainError),
    #[error("qsim: {0}")]
    Qsim(#[from] QsimError),
    #[error("pipeline: {0}")]
    Pipeline(String),
    #[error("compare: embeddings differ in shape: {a:?} vs {b:?}")]
    ShapeMismatch {
        a: (usize, usize),
        b: (usize, usize),
    },
    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("input: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::ShapeMismatch { .. } => ErrorKind::Config,
            Error::Eigenmap(
                EigenmapError::DimensionTooLarge { .. } | EigenmapError::ZeroDimension,
            ) => ErrorKind::Config,
            Error::Graph(GraphError::BadNeighborCount { .. } | GraphError::BadBandwidth(_)) => {
                ErrorKind::Config
            }
            Error::Chain(ChainError::BadScale(_)) => ErrorKind::Config,
            Error::Qsim(QsimError::BadLayout { .. }) => ErrorKind::Config,
            Error::Dataset(DatasetError::BadNoise(_) | DatasetError::UnknownKind(_)) => {
                ErrorKind::Config
            }
            Error::Dataset(DatasetError::TooFewPoints(_)) => ErrorKind::Input,
            Error::Dataset(_) | Error::Io { .. } | Error::Parse(_) => ErrorKind::Input,
            _ => ErrorKind::Computation,
        }
    }
}
