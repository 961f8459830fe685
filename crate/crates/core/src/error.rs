use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, EcneError>;

#[derive(Debug, Error)]
pub enum EcneError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node id {id} out of range (graph has {count} nodes)")]
    NodeOutOfRange { id: usize, count: usize },

    #[error("linear solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("centrality of node {node} is {value}; clamp before inverting")]
    UnclampedCentrality { node: usize, value: f64 },

    #[error("no edge embedding row for edge {0}")]
    MissingEmbedding(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no positive training pairs: every walk has length 1")]
    NoPositivePairs,

    #[error("cannot sample {requested} negative pairs: only {available} non-edges exist")]
    TooDense { requested: usize, available: usize },

    #[error("loss became non-finite at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("unknown aggregator {0:?}")]
    UnknownAggregator(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl EcneError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EcneError::Io {
            path: path.into(),
            source,
        }
    }
}
