//! Community labels for edges, edge classification and clustering, and
//! ranking metrics.

mod auc;
mod classify;
mod cluster;
mod combine;
mod community;
mod labels;
mod report;

pub use auc::auc;
pub use classify::{classify, f1_scores, stratified_split, ClassifyOutcome, F1Scores, LogisticConfig, OneVsRest};
pub use cluster::{kmeans, nmi, Clustering, KMeansConfig};
pub use combine::{combine_node_embeddings, CombineOp};
pub use community::{detect_communities, modularity, CommunityPartition};
pub use labels::{label_edges, EdgeLabeling};
pub use report::{write_report, MetricReport, REPORT_HEADER};

use crate::embed::EmbeddingMatrix;
use crate::error::{EcneError, Result};
use crate::graph::{EdgeId, Graph};

/// Embedding rows of the given edges, found by canonical edge name.
pub fn edge_features(matrix: &EmbeddingMatrix, g: &Graph, edges: &[EdgeId]) -> Result<Vec<Vec<f64>>> {
    edges
        .iter()
        .map(|&e| {
            let name = g.edge_name(e);
            matrix
                .row_by_name(&name)
                .map(|r| r.iter().map(|&x| f64::from(x)).collect())
                .ok_or(EcneError::MissingEmbedding(name))
        })
        .collect()
}
