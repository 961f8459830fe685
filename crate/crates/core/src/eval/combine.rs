//! Edge vectors built from node embeddings, for the indirect baselines.

use std::fmt;
use std::str::FromStr;

use crate::embed::EmbeddingMatrix;
use crate::error::{EcneError, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Average,
    Hadamard,
    WeightedL1,
    WeightedL2,
}

impl CombineOp {
    pub const ALL: [CombineOp; 4] = [
        CombineOp::Average,
        CombineOp::Hadamard,
        CombineOp::WeightedL1,
        CombineOp::WeightedL2,
    ];

    pub fn apply(self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let f: fn(f64, f64) -> f64 = match self {
            CombineOp::Average => |a, b| (a + b) / 2.0,
            CombineOp::Hadamard => |a, b| a * b,
            CombineOp::WeightedL1 => |a, b| (a - b).abs(),
            CombineOp::WeightedL2 => |a, b| (a - b) * (a - b),
        };
        x.iter().zip(y).map(|(&a, &b)| f(a, b)).collect()
    }
}

impl fmt::Display for CombineOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombineOp::Average => "average",
            CombineOp::Hadamard => "hadamard",
            CombineOp::WeightedL1 => "weighted-l1",
            CombineOp::WeightedL2 => "weighted-l2",
        })
    }
}

impl FromStr for CombineOp {
    type Err = EcneError;

    fn from_str(s: &str) -> Result<Self> {
        CombineOp::ALL
            .into_iter()
            .find(|op| op.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| EcneError::InvalidArgument(format!("unknown combination operator {s:?}")))
    }
}

fn node_row(nodes: &EmbeddingMatrix, g: &Graph, v: usize) -> Result<Vec<f64>> {
    nodes
        .row_by_name(g.label(v))
        .map(|r| r.iter().map(|&x| f64::from(x)).collect())
        .ok_or_else(|| EcneError::MissingEmbedding(format!("node {}", g.label(v))))
}

/// One row per edge of `g`, named like the edge embeddings, from node rows
/// looked up by node label.
pub fn combine_node_embeddings(nodes: &EmbeddingMatrix, g: &Graph, op: CombineOp) -> Result<EmbeddingMatrix> {
    let mut values = Vec::with_capacity(g.edge_count() * nodes.dim());
    let mut names = Vec::with_capacity(g.edge_count());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let row = op.apply(&node_row(nodes, g, u)?, &node_row(nodes, g, v)?);
        values.extend(row.into_iter().map(|x| x as f32));
        names.push(g.edge_name(e));
    }
    EmbeddingMatrix::new(names, nodes.dim(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators() {
        let x = [1.0, -2.0, 0.5];
        let y = [3.0, 4.0, -2.0];
        assert_eq!(CombineOp::Hadamard.apply(&x, &y), vec![3.0, -8.0, -1.0]);
        assert_eq!(CombineOp::Average.apply(&x, &x), x.to_vec());
        assert_eq!(CombineOp::WeightedL1.apply(&x, &x), vec![0.0; 3]);
        assert_eq!(CombineOp::WeightedL2.apply(&x, &y), vec![4.0, 36.0, 6.25]);
        for op in CombineOp::ALL {
            assert_eq!(op.apply(&x, &y), op.apply(&y, &x));
            assert_eq!(op.to_string().parse::<CombineOp>().unwrap(), op);
        }
    }

    #[test]
    fn edge_rows_from_nodes() {
        let g = Graph::with_labels(vec!["a".into(), "b".into()], [(0, 1)]).unwrap();
        let nodes = EmbeddingMatrix::new(vec!["a".into(), "b".into()], 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let e = combine_node_embeddings(&nodes, &g, CombineOp::Average).unwrap();
        assert_eq!(e.row(0), &[2.0, 3.0]);
        let missing = EmbeddingMatrix::new(vec!["a".into()], 2, vec![1.0, 2.0]).unwrap();
        assert!(combine_node_embeddings(&missing, &g, CombineOp::Average).is_err());
    }
}
