//! Edge embeddings: weighted walks on the line graph plus skip-gram.

mod alias;
mod matrix;
mod skipgram;
mod walks;

use std::time::{Duration, Instant};

pub use alias::AliasTable;
pub use matrix::EmbeddingMatrix;
pub use skipgram::{sigmoid, train_skipgram, SkipGramModel};
pub use walks::{generate_walks, TransitionTables, Walk};

use crate::centrality::{current_flow_betweenness_with, CentralityOptions, DEFAULT_EPSILON};
use crate::error::{EcneError, Result};
use crate::graph::Graph;
use crate::linegraph::build_line_graph;

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    /// Maximum number of line-nodes in a walk.
    pub walk_length: usize,
    pub window: usize,
    pub negatives: usize,
    pub seed: u64,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    /// Skip-gram workers; 1 is the deterministic mode.
    pub workers: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 100,
            window: 10,
            negatives: 100,
            seed: 1,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 0.0001,
            workers: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(EcneError::InvalidArgument(what.to_owned()));
        if self.walks_per_node < 1 {
            return bad("walks per node must be >= 1");
        }
        if self.walk_length < 1 {
            return bad("walk length must be >= 1");
        }
        if self.window < 1 {
            return bad("window must be >= 1");
        }
        if self.negatives < 1 {
            return bad("negative samples must be >= 1");
        }
        if !(self.lr_end > 0.0 && self.lr_start >= self.lr_end) {
            return bad("learning rates need lr_start >= lr_end > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionMode {
    /// `d = d_fixed` for every graph.
    Fixed,
    /// Match the parameter budget of `|V|·d_fixed` node embeddings.
    Matched,
}

impl std::str::FromStr for DimensionMode {
    type Err = EcneError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ecne" | "fixed" => Ok(DimensionMode::Fixed),
            "ecne-d" | "matched" => Ok(DimensionMode::Matched),
            other => Err(EcneError::InvalidArgument(format!(
                "unknown mode {other:?} (expected ecne or ecne-d)"
            ))),
        }
    }
}

pub const DEFAULT_DIM: usize = 128;

/// Embedding dimension for a graph with the given counts. The matched mode
/// takes the smallest multiple of 8 with `edges·d >= nodes·d_fixed`, never
/// more than `d_fixed`.
pub fn choose_dimension_for(nodes: usize, edges: usize, mode: DimensionMode, d_fixed: usize) -> usize {
    match mode {
        DimensionMode::Fixed => d_fixed,
        DimensionMode::Matched => {
            let budget = nodes * d_fixed;
            let d = budget.div_ceil(edges.max(1)).div_ceil(8) * 8;
            d.clamp(8.min(d_fixed), d_fixed)
        }
    }
}

pub fn choose_dimension(g: &Graph, mode: DimensionMode, d_fixed: usize) -> usize {
    choose_dimension_for(g.node_count(), g.edge_count(), mode, d_fixed)
}

#[derive(Debug, Clone)]
pub struct EcneConfig {
    pub mode: DimensionMode,
    pub d_fixed: usize,
    pub epsilon: f64,
    pub walk: WalkConfig,
    pub centrality: CentralityOptions,
}

impl Default for EcneConfig {
    fn default() -> Self {
        EcneConfig {
            mode: DimensionMode::Fixed,
            d_fixed: DEFAULT_DIM,
            epsilon: DEFAULT_EPSILON,
            walk: WalkConfig::default(),
            centrality: CentralityOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EcneStats {
    pub line_nodes: usize,
    pub line_edges: usize,
    pub dim: usize,
    pub walks: usize,
    pub clamped_nodes: usize,
    pub epoch_losses: Vec<f64>,
    pub timings: Vec<(&'static str, Duration)>,
}

#[derive(Debug, Clone)]
pub struct EcneOutput {
    /// One row per original edge, in edge-id order, named `u_v`.
    pub embeddings: EmbeddingMatrix,
    pub stats: EcneStats,
}

/// Centrality → clamp → line graph → weights → dimension → walks → skip-gram.
pub fn ecne_pipeline(g: &Graph, cfg: &EcneConfig) -> Result<EcneOutput> {
    if g.edge_count() == 0 {
        return Err(EcneError::EmptyGraph);
    }
    cfg.walk.validate()?;
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, Duration)>| {
        timings.push((name, clock.elapsed()));
        clock = Instant::now();
    };

    let cb = current_flow_betweenness_with(g, &cfg.centrality)?.clamp(cfg.epsilon)?;
    lap("centrality", &mut timings);
    let lg = build_line_graph(g).weight_edges(&cb)?;
    lap("line_graph", &mut timings);
    let dim = choose_dimension(g, cfg.mode, cfg.d_fixed);
    let walks = generate_walks(&lg, &cfg.walk);
    lap("walks", &mut timings);
    let model = train_skipgram(&walks, lg.node_count(), dim, &cfg.walk)?;
    lap("skipgram", &mut timings);

    let names = (0..g.edge_count()).map(|e| g.edge_name(e)).collect();
    let embeddings = EmbeddingMatrix::new(names, dim, model.input)?;
    Ok(EcneOutput {
        embeddings,
        stats: EcneStats {
            line_nodes: lg.node_count(),
            line_edges: lg.edge_count(),
            dim,
            walks: walks.len(),
            clamped_nodes: cb.clamped_count(),
            epoch_losses: model.epoch_losses,
            timings,
        },
    })
}
