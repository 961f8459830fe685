//! Weighted line graph: one line-node per original edge, one line-edge per
//! pair of original edges that share an endpoint.
//!
//! A line-edge joining `(i, j)` and `(j, k)` stands for the walk `i → j → k`
//! and is weighted `1/cb(i) + 1/cb(j) + 1/cb(k)`.

use std::io::Write;

use rayon::prelude::*;

use crate::centrality::CentralityVector;
use crate::error::{EcneError, Result};
use crate::graph::{EdgeId, Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEdge {
    pub a: EdgeId,
    pub b: EdgeId,
    pub shared: NodeId,
    pub weight: f64,
}

/// Adjacency entry of a line-node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineNeighbor {
    pub node: EdgeId,
    pub line_edge: usize,
}

#[derive(Debug, Clone)]
pub struct WeightedLineGraph {
    node_count: usize,
    endpoints: Vec<(NodeId, NodeId)>,
    edges: Vec<LineEdge>,
    adjacency: Vec<Vec<LineNeighbor>>,
}

impl WeightedLineGraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[LineEdge] {
        &self.edges
    }

    pub fn neighbors(&self, node: EdgeId) -> &[LineNeighbor] {
        &self.adjacency[node]
    }

    pub fn weight(&self, line_edge: usize) -> f64 {
        self.edges[line_edge].weight
    }

    /// Original endpoints of a line-node.
    pub fn endpoints(&self, node: EdgeId) -> (NodeId, NodeId) {
        self.endpoints[node]
    }

    pub fn line_node_name(&self, node: EdgeId) -> String {
        let (u, v) = self.endpoints[node];
        format!("{u}_{v}")
    }

    pub fn has_edge(&self, a: EdgeId, b: EdgeId) -> bool {
        self.find_edge(a, b).is_some()
    }

    pub fn find_edge(&self, a: EdgeId, b: EdgeId) -> Option<&LineEdge> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |n| n.node)
            .ok()
            .map(|i| &self.edges[list[i].line_edge])
    }

    /// Sets every line-edge weight from (clamped) node centralities.
    pub fn weight_edges(mut self, cb: &CentralityVector) -> Result<WeightedLineGraph> {
        let values = cb.values();
        if let Some((node, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(EcneError::UnclampedCentrality { node, value });
        }
        let endpoints = &self.endpoints;
        self.edges.par_iter_mut().for_each(|edge| {
            let i = other_endpoint(endpoints[edge.a], edge.shared);
            let k = other_endpoint(endpoints[edge.b], edge.shared);
            edge.weight = 1.0 / values[i] + 1.0 / values[edge.shared] + 1.0 / values[k];
        });
        Ok(self)
    }

    /// `lineNodeA<TAB>lineNodeB<TAB>weight`, line-nodes named `u_v`.
    pub fn write_weighted_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.line_node_name(e.a),
                self.line_node_name(e.b),
                e.weight
            )?;
        }
        Ok(())
    }
}

fn other_endpoint((u, v): (NodeId, NodeId), shared: NodeId) -> NodeId {
    if u == shared {
        v
    } else {
        u
    }
}

/// Builds the line graph with unit weights. Line-edges are ordered by `(a, b)`
/// with `a < b`.
pub fn build_line_graph(g: &Graph) -> WeightedLineGraph {
    let mut edges: Vec<LineEdge> = (0..g.node_count())
        .into_par_iter()
        .flat_map_iter(|j| {
            let incident = g.neighbors(j);
            let mut clique = Vec::with_capacity(incident.len() * incident.len().saturating_sub(1) / 2);
            for (x, p) in incident.iter().enumerate() {
                for q in &incident[x + 1..] {
                    clique.push(LineEdge {
                        a: p.edge.min(q.edge),
                        b: p.edge.max(q.edge),
                        shared: j,
                        weight: 1.0,
                    });
                }
            }
            clique
        })
        .collect();
    edges.sort_by_key(|e| (e.a, e.b));
    // a repeated pair would mean two original edges share both endpoints
    assert!(
        edges.windows(2).all(|w| (w[0].a, w[0].b) != (w[1].a, w[1].b)),
        "parallel edges in a simple graph"
    );

    let mut adjacency = vec![Vec::new(); g.edge_count()];
    for (idx, e) in edges.iter().enumerate() {
        adjacency[e.a].push(LineNeighbor {
            node: e.b,
            line_edge: idx,
        });
        adjacency[e.b].push(LineNeighbor {
            node: e.a,
            line_edge: idx,
        });
    }
    for list in &mut adjacency {
        list.sort_by_key(|n| n.node);
    }
    WeightedLineGraph {
        node_count: g.edge_count(),
        endpoints: g.edges().to_vec(),
        edges,
        adjacency,
    }
}

/// `(|V_L|, |E_L|) = (|E|, ½ Σ d_v² − |E|)`.
pub fn size_estimate(g: &Graph) -> (usize, usize) {
    let sum_sq: usize = g.degrees().iter().map(|d| d * d).sum();
    (g.edge_count(), sum_sq / 2 - g.edge_count())
}
