//! Path-based link prediction over edge embeddings.
//!
//! A candidate pair `(u, v)` is described by the simple paths joining it,
//! grouped by length. Each path becomes the sequence of its edge vectors,
//! an aggregator reduces each length group to one vector, and a logistic
//! unit over the concatenation gives the plausibility score `η`.

mod adam;
mod aggregator;
mod avg;
mod dataset;
mod experiment;
mod lstm;
mod maxpool;
mod model;
mod paths;
mod tensor;
mod train;

pub use adam::{Adam, AdamConfig};
pub use aggregator::{
    embed_path, AggregatorFactory, AggregatorRegistry, AggregatorSpec, EdgeVectors, PathAggregator, Trace,
};
pub use avg::AveragePool;
pub use dataset::{build_dataset, LinkDataset, LinkExample, SplitPolicy, SMALL_GRAPH_NODES};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentRun};
pub use lstm::LstmMaxPool;
pub use maxpool::DenseMaxPool;
pub use model::{bce_loss, Checkpoint, Forward, Gradients, LinkModel, DEFAULT_HIDDEN};
pub use paths::{build_bundle, find_paths, PathBundle, PathSample};
pub use tensor::Tensor;
pub use train::{score, train, History, Sample, TrainConfig};

pub const DEFAULT_LENGTHS: [usize; 2] = [3, 4];
pub const DEFAULT_MAX_PATHS: usize = 100;
