use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::alias::AliasTable;
use super::WalkConfig;
use crate::graph::EdgeId;
use crate::linegraph::WeightedLineGraph;
use crate::seed::derive_seed;

pub type Walk = Vec<EdgeId>;

/// Per-line-node transition tables, proportional to line-edge weights.
#[derive(Debug, Clone)]
pub struct TransitionTables {
    neighbors: Vec<Vec<EdgeId>>,
    tables: Vec<Option<AliasTable>>,
}

impl TransitionTables {
    pub fn new(lg: &WeightedLineGraph) -> TransitionTables {
        let (neighbors, tables) = (0..lg.node_count())
            .into_par_iter()
            .map(|v| {
                let nbs = lg.neighbors(v);
                let ids: Vec<EdgeId> = nbs.iter().map(|n| n.node).collect();
                let table = if nbs.is_empty() {
                    None
                } else {
                    let w: Vec<f64> = nbs.iter().map(|n| lg.weight(n.line_edge)).collect();
                    Some(AliasTable::new(&w))
                };
                (ids, table)
            })
            .unzip();
        TransitionTables { neighbors, tables }
    }

    pub fn step(&self, from: EdgeId, rng: &mut ChaCha8Rng) -> Option<EdgeId> {
        self.tables[from].as_ref().map(|t| self.neighbors[from][t.sample(rng)])
    }

    pub fn walk(&self, start: EdgeId, length: usize, rng: &mut ChaCha8Rng) -> Walk {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        let mut current = start;
        while walk.len() < length {
            match self.step(current, rng) {
                Some(next) => {
                    walk.push(next);
                    current = next;
                }
                None => break,
            }
        }
        walk
    }
}

/// `walks_per_node` rounds; each round visits every line-node once in a
/// shuffled order. Every walk draws from its own stream derived from
/// `(seed, round, start)`, so the output does not depend on thread count.
pub fn generate_walks(lg: &WeightedLineGraph, cfg: &WalkConfig) -> Vec<Walk> {
    let tables = TransitionTables::new(lg);
    let mut walks = Vec::with_capacity(lg.node_count() * cfg.walks_per_node);
    for round in 0..cfg.walks_per_node {
        let mut order: Vec<EdgeId> = (0..lg.node_count()).collect();
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x5348, round as u64]));
        order.shuffle(&mut shuffle_rng);
        let batch: Vec<Walk> = order
            .par_iter()
            .map(|&start| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[round as u64, start as u64]));
                tables.walk(start, cfg.walk_length, &mut rng)
            })
            .collect();
        walks.extend(batch);
    }
    walks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::linegraph::build_line_graph;

    fn cfg(n: usize, len: usize) -> WalkConfig {
        WalkConfig {
            walks_per_node: n,
            walk_length: len,
            ..WalkConfig::default()
        }
    }

    #[test]
    fn isolated_line_node_gives_length_one_walks() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let walks = generate_walks(&build_line_graph(&g), &cfg(3, 10));
        assert_eq!(walks.len(), 3);
        assert!(walks.iter().all(|w| w == &vec![0]));
    }

    #[test]
    fn two_node_line_graph_alternates() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let walks = generate_walks(&build_line_graph(&g), &cfg(4, 5));
        assert_eq!(walks.len(), 8);
        for w in walks {
            assert_eq!(w.len(), 5);
            assert!(w.windows(2).all(|p| p[0] != p[1]));
        }
    }

    #[test]
    fn every_start_once_per_round() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let walks = generate_walks(&build_line_graph(&g), &cfg(3, 4));
        for round in walks.chunks(4) {
            let mut starts: Vec<_> = round.iter().map(|w| w[0]).collect();
            starts.sort();
            assert_eq!(starts, vec![0, 1, 2, 3]);
        }
    }
}
