use super::aggregator::{check_paths, AggregatorSpec, EdgeVectors, PathAggregator, Trace};
use super::tensor::Tensor;
use crate::error::Result;
use crate::graph::EdgeId;

/// Element-wise mean of the concatenated edge vectors of each path.
#[derive(Debug, Clone)]
pub struct AveragePool {
    dim: usize,
    length: usize,
}

impl AveragePool {
    pub const NAME: &'static str = "avg";

    pub fn new(spec: &AggregatorSpec) -> AveragePool {
        AveragePool {
            dim: spec.dim,
            length: spec.path_length,
        }
    }
}

impl PathAggregator for AveragePool {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn path_length(&self) -> usize {
        self.length
    }

    fn output_dim(&self) -> usize {
        self.dim * self.length
    }

    fn params(&self) -> &[Tensor] {
        &[]
    }

    fn params_mut(&mut self) -> &mut [Tensor] {
        &mut []
    }

    fn forward(&self, table: &EdgeVectors, paths: &[&[EdgeId]]) -> Result<Trace> {
        check_paths(table, paths, self.dim, self.length)?;
        let mut out = vec![0.0; self.output_dim()];
        for path in paths {
            for (slot, &e) in out.chunks_exact_mut(self.dim).zip(path.iter()) {
                for (o, x) in slot.iter_mut().zip(table.row(e)) {
                    *o += x;
                }
            }
        }
        let n = paths.len() as f64;
        out.iter_mut().for_each(|v| *v /= n);
        Ok(Trace {
            output: out,
            cache: Box::new(()),
        })
    }

    fn backward(&self, _trace: &Trace, _grad_output: &[f64], _grads: &mut [Tensor]) {}

    fn clone_box(&self) -> Box<dyn PathAggregator> {
        Box::new(self.clone())
    }
}
