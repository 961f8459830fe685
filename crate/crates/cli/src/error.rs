use ecne::EcneError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Ecne {
        context: &'static str,
        #[source]
        source: EcneError,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad usage or input, 1 for failures inside the pipeline.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Ecne { source, .. } => match source {
                EcneError::Io { .. }
                | EcneError::Parse { .. }
                | EcneError::EmptyGraph
                | EcneError::NodeOutOfRange { .. }
                | EcneError::InvalidArgument(_)
                | EcneError::UnknownAggregator(_)
                | EcneError::TooDense { .. }
                | EcneError::MissingEmbedding(_)
                | EcneError::Checkpoint(_) => 2,
                _ => 1,
            },
            CliError::Output { .. } => 1,
        }
    }
}

pub trait Context<T> {
    fn context(self, context: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for ecne::Result<T> {
    fn context(self, context: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Ecne { context, source })
    }
}
