use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::aggregator::{AggregatorRegistry, AggregatorSpec, EdgeVectors, PathAggregator, Trace};
use super::paths::{PathBundle, PathSample};
use super::tensor::{dot, sigmoid, Tensor};
use crate::error::{EcneError, Result};
use crate::graph::EdgeId;

pub const DEFAULT_HIDDEN: usize = 64;
const CHECKPOINT_FORMAT: &str = "ecne-link-model";
const CHECKPOINT_VERSION: u32 = 1;

/// One aggregator per path length, followed by a logistic output unit over
/// the concatenated per-length representations. Each length contributes its
/// representation plus a presence flag (0 when no path of that length exists).
#[derive(Debug, Clone)]
pub struct LinkModel {
    aggregator: String,
    dim: usize,
    hidden: usize,
    lengths: Vec<usize>,
    aggregators: Vec<Box<dyn PathAggregator>>,
    classifier: Vec<Tensor>,
}

#[derive(Debug)]
pub struct Forward {
    traces: Vec<Option<Trace>>,
    pub features: Vec<f64>,
    pub logit: f64,
    pub eta: f64,
}

/// Gradient buffers laid out like [`LinkModel::params`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub tensors: Vec<Tensor>,
}

impl Gradients {
    pub fn add(&mut self, other: &Gradients) {
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            a.add_assign(b);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.tensors.iter_mut().for_each(|t| t.scale(factor));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub aggregator: String,
    pub dim: usize,
    pub hidden: usize,
    pub lengths: Vec<usize>,
    pub tensors: Vec<Tensor>,
}

impl LinkModel {
    pub fn new(
        registry: &AggregatorRegistry,
        aggregator: &str,
        dim: usize,
        lengths: &[usize],
        hidden: usize,
        seed: u64,
    ) -> Result<LinkModel> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(EcneError::InvalidArgument(format!(
                "path lengths must be non-empty and positive, got {lengths:?}"
            )));
        }
        if dim == 0 || hidden == 0 {
            return Err(EcneError::InvalidArgument("dim and hidden must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let aggregators = lengths
            .iter()
            .map(|&l| {
                let spec = AggregatorSpec {
                    dim,
                    path_length: l,
                    hidden,
                };
                registry.create(aggregator, &spec, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let features: usize = aggregators.iter().map(|a| a.output_dim() + 1).sum();
        // an untrained model scores every pair 0.5
        let classifier = vec![
            Tensor::zeros("classifier.weight", &[features]),
            Tensor::zeros("classifier.bias", &[1]),
        ];
        Ok(LinkModel {
            aggregator: aggregator.to_owned(),
            dim,
            hidden,
            lengths: lengths.to_vec(),
            aggregators,
            classifier,
        })
    }

    pub fn aggregator(&self) -> &str {
        &self.aggregator
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature_dim(&self) -> usize {
        self.classifier[0].len()
    }

    pub fn params(&self) -> Vec<&Tensor> {
        self.aggregators
            .iter()
            .flat_map(|a| a.params().iter())
            .chain(&self.classifier)
            .collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.aggregators
            .iter_mut()
            .flat_map(|a| a.params_mut().iter_mut())
            .chain(self.classifier.iter_mut())
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|t| t.len()).sum()
    }

    pub fn zero_grads(&self) -> Gradients {
        Gradients {
            tensors: self.params().into_iter().map(Tensor::zeros_like).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.params().iter().all(|t| t.is_finite())
    }

    pub fn forward(&self, table: &EdgeVectors, bundle: &PathBundle) -> Result<Forward> {
        if table.dim() != self.dim {
            return Err(EcneError::Shape(format!(
                "model expects dim {}, embeddings have {}",
                self.dim,
                table.dim()
            )));
        }
        let mut features = Vec::with_capacity(self.feature_dim());
        let mut traces = Vec::with_capacity(self.lengths.len());
        for (agg, &l) in self.aggregators.iter().zip(&self.lengths) {
            let mut paths: Vec<&PathSample> = bundle.paths(l).iter().collect();
            if paths.is_empty() {
                features.extend(std::iter::repeat_n(0.0, agg.output_dim()));
                features.push(0.0);
                traces.push(None);
                continue;
            }
            // canonical order for the order-sensitive aggregators
            paths.sort_by(|a, b| a.nodes.cmp(&b.nodes));
            let edges: Vec<&[EdgeId]> = paths.iter().map(|p| p.edges.as_slice()).collect();
            let trace = agg.forward(table, &edges)?;
            features.extend_from_slice(&trace.output);
            features.push(1.0);
            traces.push(Some(trace));
        }
        let logit = dot(&self.classifier[0].data, &features) + self.classifier[1].data[0];
        Ok(Forward {
            traces,
            features,
            logit,
            eta: sigmoid(logit),
        })
    }

    /// Plausibility score in (0, 1).
    pub fn predict(&self, table: &EdgeVectors, bundle: &PathBundle) -> Result<f64> {
        self.forward(table, bundle).map(|f| f.eta)
    }

    /// Accumulates `dlogit · ∂logit/∂θ` into `grads`.
    pub fn backward(&self, forward: &Forward, dlogit: f64, grads: &mut Gradients) {
        let classifier_at = grads.tensors.len() - 2;
        {
            let (gw, gb) = grads.tensors[classifier_at..].split_at_mut(1);
            for (g, x) in gw[0].data.iter_mut().zip(&forward.features) {
                *g += dlogit * x;
            }
            gb[0].data[0] += dlogit;
        }
        let mut offset = 0;
        let mut tensor_at = 0;
        for (agg, trace) in self.aggregators.iter().zip(&forward.traces) {
            let width = agg.output_dim();
            let count = agg.params().len();
            if let Some(trace) = trace {
                let grad_out: Vec<f64> = self.classifier[0].data[offset..offset + width]
                    .iter()
                    .map(|w| dlogit * w)
                    .collect();
                agg.backward(trace, &grad_out, &mut grads.tensors[tensor_at..tensor_at + count]);
            }
            offset += width + 1;
            tensor_at += count;
        }
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_owned(),
            version: CHECKPOINT_VERSION,
            aggregator: self.aggregator.clone(),
            dim: self.dim,
            hidden: self.hidden,
            lengths: self.lengths.clone(),
            tensors: self.params().into_iter().cloned().collect(),
        }
    }

    pub fn from_checkpoint(registry: &AggregatorRegistry, ckpt: &Checkpoint) -> Result<LinkModel> {
        if ckpt.format != CHECKPOINT_FORMAT || ckpt.version != CHECKPOINT_VERSION {
            return Err(EcneError::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                ckpt.format, ckpt.version
            )));
        }
        let mut model = LinkModel::new(registry, &ckpt.aggregator, ckpt.dim, &ckpt.lengths, ckpt.hidden, 0)?;
        let params = model.params_mut();
        if params.len() != ckpt.tensors.len() {
            return Err(EcneError::Checkpoint(format!(
                "expected {} tensors, found {}",
                params.len(),
                ckpt.tensors.len()
            )));
        }
        for (dst, src) in params.into_iter().zip(&ckpt.tensors) {
            if dst.name != src.name || dst.shape != src.shape || src.data.len() != dst.data.len() {
                return Err(EcneError::Checkpoint(format!(
                    "tensor {} {:?} does not match {} {:?}",
                    src.name, src.shape, dst.name, dst.shape
                )));
            }
            dst.data.clone_from(&src.data);
        }
        Ok(model)
    }
}

/// Mean binary cross-entropy; predictions are clamped to `[1e-7, 1 - 1e-7]`.
pub fn bce_loss(predictions: &[f64], labels: &[f64]) -> f64 {
    const CLAMP: f64 = 1e-7;
    let total: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(CLAMP, 1.0 - CLAMP);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / predictions.len().max(1) as f64
}
