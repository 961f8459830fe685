//! Positive/negative candidate pairs and the train/test protocol.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::paths::{build_bundle, PathBundle};
use crate::error::{EcneError, Result};
use crate::graph::{Graph, NodeId};
use crate::seed::derive_seed;

/// Graphs above this node count use the large-graph split.
pub const SMALL_GRAPH_NODES: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitPolicy {
    /// 90/10 up to 4,000 nodes, 50/50 above.
    Auto,
    Fraction(f64),
}

impl SplitPolicy {
    pub fn train_fraction(&self, node_count: usize) -> f64 {
        match *self {
            SplitPolicy::Auto if node_count <= SMALL_GRAPH_NODES => 0.9,
            SplitPolicy::Auto => 0.5,
            SplitPolicy::Fraction(f) => f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkExample {
    pub u: NodeId,
    pub v: NodeId,
    /// 1 for an existing edge, 0 for a sampled non-edge.
    pub label: f64,
}

#[derive(Debug, Clone)]
pub struct LinkDataset {
    pub train: Vec<LinkExample>,
    pub test: Vec<LinkExample>,
    pub train_fraction: f64,
    pub seed: u64,
    /// Input graph minus the test positives; paths and embeddings come from here.
    pub path_graph: Graph,
}

impl LinkDataset {
    pub fn negatives(&self) -> impl Iterator<Item = &LinkExample> {
        self.train.iter().chain(&self.test).filter(|e| e.label == 0.0)
    }

    pub fn test_positives(&self) -> Vec<(NodeId, NodeId)> {
        self.test
            .iter()
            .filter(|e| e.label == 1.0)
            .map(|e| (e.u, e.v))
            .collect()
    }

    /// Path bundles over `path_graph`, one per example, computed in parallel.
    pub fn bundles(&self, examples: &[LinkExample], lengths: &[usize], max_paths: usize) -> Result<Vec<PathBundle>> {
        examples
            .par_iter()
            .map(|e| build_bundle(&self.path_graph, e.u, e.v, lengths, max_paths, self.seed))
            .collect()
    }
}

/// Every edge is a positive; an equal number of distinct non-edges are the
/// negatives. Both are split at the same ratio, and test positives are
/// removed from the graph used for path extraction.
pub fn build_dataset(g: &Graph, policy: SplitPolicy, seed: u64) -> Result<LinkDataset> {
    let fraction = policy.train_fraction(g.node_count());
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(EcneError::InvalidArgument(format!(
            "train fraction must be in (0, 1), got {fraction}"
        )));
    }
    let m = g.edge_count();
    if m < 2 {
        return Err(EcneError::InvalidArgument("need at least two edges to split".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0xda7a]));

    let mut positives: Vec<(NodeId, NodeId)> = g.edges().to_vec();
    positives.shuffle(&mut rng);
    let n_train = ((fraction * m as f64).round() as usize).clamp(1, m - 1);

    let negatives = sample_non_edges(g, m, &mut rng)?;

    let to_examples = |pairs: &[(NodeId, NodeId)], label: f64| {
        pairs
            .iter()
            .map(|&(u, v)| LinkExample { u, v, label })
            .collect::<Vec<_>>()
    };
    let mut train = to_examples(&positives[..n_train], 1.0);
    train.extend(to_examples(&negatives[..n_train], 0.0));
    let mut test = to_examples(&positives[n_train..], 1.0);
    test.extend(to_examples(&negatives[n_train..], 0.0));
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);

    let path_graph = g.without_edges(&positives[n_train..]);
    Ok(LinkDataset {
        train,
        test,
        train_fraction: fraction,
        seed,
        path_graph,
    })
}

/// `count` distinct node pairs with no edge, uniformly at random.
fn sample_non_edges(g: &Graph, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.node_count();
    let all_pairs = n * n.saturating_sub(1) / 2;
    let available = all_pairs - g.edge_count();
    if available < count {
        return Err(EcneError::TooDense {
            requested: count,
            available,
        });
    }
    if available <= 4 * count {
        let mut pool: Vec<(NodeId, NodeId)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        pool.shuffle(rng);
        pool.truncate(count);
        return Ok(pool);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1) || !seen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    Ok(out)
}
