//! Edge-centric network embeddings.
//!
//! Edges of an undirected graph become nodes of a line graph whose edges are
//! weighted by inverse current-flow betweenness. Weighted random walks over
//! that line graph feed a skip-gram model, giving one vector per original
//! edge. The [`linkpred`] module uses those vectors to score candidate links
//! from the simple paths joining them, and [`eval`] holds the community,
//! classification, clustering and ranking metrics.

pub mod centrality;
pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod linegraph;
pub mod linkpred;
pub mod seed;

pub use error::{EcneError, Result};
pub use graph::{load_edge_list, EdgeId, Graph, NodeId};
pub use seed::derive_seed;
