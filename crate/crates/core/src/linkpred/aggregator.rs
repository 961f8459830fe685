//! Path aggregators and the name registry they are selected from.
//!
//! An aggregator reduces the vectorized paths of one length to a single
//! fixed-size representation. Implementations own their parameters as named
//! [`Tensor`]s so the optimizer, checkpoints and gradient checks can treat
//! every aggregator alike.

use std::any::Any;
use std::collections::BTreeMap;
use std::fmt;

use rand_chacha::ChaCha8Rng;

use super::tensor::Tensor;
use super::{avg::AveragePool, lstm::LstmMaxPool, maxpool::DenseMaxPool};
use crate::embed::EmbeddingMatrix;
use crate::error::{EcneError, Result};
use crate::graph::{EdgeId, Graph};

/// Edge embeddings in `f64`, indexed by the path graph's edge ids.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVectors {
    dim: usize,
    data: Vec<f64>,
}

impl EdgeVectors {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<EdgeVectors> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(EcneError::Shape(format!(
                "{} values do not split into rows of {dim}",
                data.len()
            )));
        }
        Ok(EdgeVectors { dim, data })
    }

    /// Looks up every edge of `g` by its `u_v` name.
    pub fn from_matrix(matrix: &EmbeddingMatrix, g: &Graph) -> Result<EdgeVectors> {
        let index: std::collections::HashMap<&str, usize> = matrix
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut data = Vec::with_capacity(g.edge_count() * matrix.dim());
        for e in 0..g.edge_count() {
            let name = g.edge_name(e);
            let row = index.get(name.as_str()).ok_or(EcneError::MissingEmbedding(name))?;
            data.extend(matrix.row(*row).iter().map(|&v| v as f64));
        }
        EdgeVectors::new(matrix.dim(), data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn row(&self, edge: EdgeId) -> &[f64] {
        &self.data[edge * self.dim..(edge + 1) * self.dim]
    }

    pub fn get(&self, edge: EdgeId) -> Result<&[f64]> {
        if edge < self.rows() {
            Ok(self.row(edge))
        } else {
            Err(EcneError::MissingEmbedding(format!("edge id {edge}")))
        }
    }
}

/// `[e^1, ..., e^l]` for a path's edges, in order.
pub fn embed_path<'a>(edges: &[EdgeId], table: &'a EdgeVectors) -> Result<Vec<&'a [f64]>> {
    edges.iter().map(|&e| table.get(e)).collect()
}

/// Forward output plus whatever the aggregator needs for its backward pass.
pub struct Trace {
    pub output: Vec<f64>,
    pub cache: Box<dyn Any + Send + Sync>,
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Trace").field("output", &self.output).finish()
    }
}

pub trait PathAggregator: Send + Sync + fmt::Debug {
    /// Registry name.
    fn name(&self) -> &'static str;

    fn path_length(&self) -> usize;

    fn output_dim(&self) -> usize;

    fn params(&self) -> &[Tensor];

    fn params_mut(&mut self) -> &mut [Tensor];

    /// `paths` holds at least one edge sequence of length `path_length()`.
    fn forward(&self, table: &EdgeVectors, paths: &[&[EdgeId]]) -> Result<Trace>;

    /// Adds `∂loss/∂params` into `grads` (same layout as `params()`).
    fn backward(&self, trace: &Trace, grad_output: &[f64], grads: &mut [Tensor]);

    fn clone_box(&self) -> Box<dyn PathAggregator>;
}

impl Clone for Box<dyn PathAggregator> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AggregatorSpec {
    /// Edge embedding dimension.
    pub dim: usize,
    pub path_length: usize,
    pub hidden: usize,
}

pub type AggregatorFactory = fn(&AggregatorSpec, &mut ChaCha8Rng) -> Box<dyn PathAggregator>;

#[derive(Clone)]
pub struct AggregatorRegistry {
    factories: BTreeMap<&'static str, AggregatorFactory>,
}

impl AggregatorRegistry {
    pub fn empty() -> AggregatorRegistry {
        AggregatorRegistry {
            factories: BTreeMap::new(),
        }
    }

    /// `avg`, `max` and `lstm`.
    pub fn builtin() -> AggregatorRegistry {
        let mut registry = AggregatorRegistry::empty();
        registry.register(AveragePool::NAME, |spec, _| Box::new(AveragePool::new(spec)));
        registry.register(DenseMaxPool::NAME, |spec, rng| Box::new(DenseMaxPool::new(spec, rng)));
        registry.register(LstmMaxPool::NAME, |spec, rng| Box::new(LstmMaxPool::new(spec, rng)));
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: AggregatorFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn create(&self, name: &str, spec: &AggregatorSpec, rng: &mut ChaCha8Rng) -> Result<Box<dyn PathAggregator>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| EcneError::UnknownAggregator(name.to_owned()))?;
        Ok(factory(spec, rng))
    }
}

impl Default for AggregatorRegistry {
    fn default() -> Self {
        AggregatorRegistry::builtin()
    }
}

impl fmt::Debug for AggregatorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

pub(crate) fn check_paths(table: &EdgeVectors, paths: &[&[EdgeId]], dim: usize, length: usize) -> Result<()> {
    if paths.is_empty() {
        return Err(EcneError::InvalidArgument("aggregator needs at least one path".into()));
    }
    if table.dim() != dim {
        return Err(EcneError::Shape(format!(
            "aggregator expects dim {dim}, embeddings have {}",
            table.dim()
        )));
    }
    for p in paths {
        if p.len() != length {
            return Err(EcneError::Shape(format!(
                "aggregator for length {length} got a path of length {}",
                p.len()
            )));
        }
        for &e in p.iter() {
            table.get(e)?;
        }
    }
    Ok(())
}
