//! One end-to-end link-prediction run: split, embed the training graph,
//! extract path bundles, train, and score the held-out pairs.

use log::info;

use super::aggregator::{AggregatorRegistry, EdgeVectors};
use super::dataset::{build_dataset, LinkDataset, LinkExample, SplitPolicy};
use super::model::LinkModel;
use super::paths::PathBundle;
use super::train::{score, train, History, Sample, TrainConfig};
use crate::embed::{ecne_pipeline, EcneConfig, EcneStats};
use crate::error::Result;
use crate::eval::auc;
use crate::graph::Graph;
use crate::seed::derive_seed;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub embedding: EcneConfig,
    pub aggregator: String,
    pub lengths: Vec<usize>,
    pub max_paths: usize,
    pub hidden: usize,
    pub training: TrainConfig,
    pub split: SplitPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            embedding: EcneConfig::default(),
            aggregator: "lstm".into(),
            lengths: super::DEFAULT_LENGTHS.to_vec(),
            max_paths: super::DEFAULT_MAX_PATHS,
            hidden: super::DEFAULT_HIDDEN,
            training: TrainConfig::default(),
            split: SplitPolicy::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub seed: u64,
    pub dataset: LinkDataset,
    pub embedding: EcneStats,
    pub model: LinkModel,
    pub history: History,
    /// Test examples with their scores, in test-set order.
    pub predictions: Vec<(LinkExample, f64)>,
    pub auc: f64,
}

fn samples<'a>(examples: &[LinkExample], bundles: &'a [PathBundle]) -> Vec<Sample<'a>> {
    examples
        .iter()
        .zip(bundles)
        .map(|(e, bundle)| Sample { bundle, label: e.label })
        .collect()
}

/// Every random choice in the run derives from `seed`.
pub fn run_experiment(
    g: &Graph,
    cfg: &ExperimentConfig,
    registry: &AggregatorRegistry,
    seed: u64,
) -> Result<ExperimentRun> {
    let dataset = build_dataset(g, cfg.split, seed)?;
    let train_graph = &dataset.path_graph;
    info!(
        "seed {seed}: {} train / {} test pairs, training graph has {} edges",
        dataset.train.len(),
        dataset.test.len(),
        train_graph.edge_count()
    );

    let mut embedding = cfg.embedding.clone();
    embedding.walk.seed = seed;
    let embedded = ecne_pipeline(train_graph, &embedding)?;
    let table = EdgeVectors::from_matrix(&embedded.embeddings, train_graph)?;

    let train_bundles = dataset.bundles(&dataset.train, &cfg.lengths, cfg.max_paths)?;
    let test_bundles = dataset.bundles(&dataset.test, &cfg.lengths, cfg.max_paths)?;
    let train_samples = samples(&dataset.train, &train_bundles);
    let test_samples = samples(&dataset.test, &test_bundles);

    let mut model = LinkModel::new(
        registry,
        &cfg.aggregator,
        table.dim(),
        &cfg.lengths,
        cfg.hidden,
        derive_seed(seed, &[0x30de1]),
    )?;
    let mut training = cfg.training.clone();
    training.seed = seed;
    let history = train(&mut model, &train_samples, &table, &training)?;

    let scored = score(&model, &test_samples, &table)?;
    let auc = auc(&scored)?;
    info!("seed {seed}: test AUC {auc:.4}");
    let predictions = dataset
        .test
        .iter()
        .zip(&scored)
        .map(|(e, &(eta, _))| (*e, eta))
        .collect();
    Ok(ExperimentRun {
        seed,
        embedding: embedded.stats,
        dataset,
        model,
        history,
        predictions,
        auc,
    })
}
