use super::community::CommunityPartition;
use crate::graph::{EdgeId, Graph};

/// Community id of every intra-community edge; edges joining two
/// communities carry no label.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLabeling {
    labels: Vec<Option<usize>>,
}

impl EdgeLabeling {
    pub fn new(labels: Vec<Option<usize>>) -> EdgeLabeling {
        EdgeLabeling { labels }
    }

    pub fn get(&self, edge: EdgeId) -> Option<usize> {
        self.labels[edge]
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    /// `(edge, class)` for every labelled edge, in edge order.
    pub fn labeled(&self) -> Vec<(EdgeId, usize)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(e, l)| l.map(|c| (e, c)))
            .collect()
    }

    pub fn excluded(&self) -> Vec<EdgeId> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_none())
            .map(|(e, _)| e)
            .collect()
    }
}

pub fn label_edges(g: &Graph, partition: &CommunityPartition) -> EdgeLabeling {
    let labels = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (cu, cv) = (partition.labels[u], partition.labels[v]);
            (cu == cv).then_some(cu)
        })
        .collect();
    EdgeLabeling { labels }
}
