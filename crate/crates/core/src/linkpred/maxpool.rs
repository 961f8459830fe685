use rand_chacha::ChaCha8Rng;

use super::aggregator::{check_paths, AggregatorSpec, EdgeVectors, PathAggregator, Trace};
use super::tensor::{matvec_add, outer_add, Tensor};
use crate::error::Result;
use crate::graph::EdgeId;

/// `max_p ReLU(W · concat(path_p) + b)`, element-wise over paths.
#[derive(Debug, Clone)]
pub struct DenseMaxPool {
    dim: usize,
    length: usize,
    hidden: usize,
    params: Vec<Tensor>,
}

struct Cache {
    inputs: Vec<Vec<f64>>,
    /// path index selected by the max for each unit, `None` when ReLU was inactive.
    winner: Vec<Option<usize>>,
}

impl DenseMaxPool {
    pub const NAME: &'static str = "max";

    pub fn new(spec: &AggregatorSpec, rng: &mut ChaCha8Rng) -> DenseMaxPool {
        let fan_in = spec.dim * spec.path_length;
        let bound = (6.0 / (fan_in + spec.hidden) as f64).sqrt();
        let l = spec.path_length;
        DenseMaxPool {
            dim: spec.dim,
            length: l,
            hidden: spec.hidden,
            params: vec![
                Tensor::uniform(format!("max{l}.weight"), &[spec.hidden, fan_in], bound, rng),
                Tensor::zeros(format!("max{l}.bias"), &[spec.hidden]),
            ],
        }
    }

    fn concat(&self, table: &EdgeVectors, path: &[EdgeId]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim * self.length);
        for &e in path {
            x.extend_from_slice(table.row(e));
        }
        x
    }
}

impl PathAggregator for DenseMaxPool {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn path_length(&self) -> usize {
        self.length
    }

    fn output_dim(&self) -> usize {
        self.hidden
    }

    fn params(&self) -> &[Tensor] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [Tensor] {
        &mut self.params
    }

    fn forward(&self, table: &EdgeVectors, paths: &[&[EdgeId]]) -> Result<Trace> {
        check_paths(table, paths, self.dim, self.length)?;
        let cols = self.dim * self.length;
        let mut output = vec![0.0; self.hidden];
        let mut winner = vec![None; self.hidden];
        let mut inputs = Vec::with_capacity(paths.len());
        for (p, path) in paths.iter().enumerate() {
            let x = self.concat(table, path);
            let mut z = self.params[1].data.clone();
            matvec_add(&self.params[0].data, cols, &x, &mut z);
            for j in 0..self.hidden {
                // ReLU output is ≥ 0, so a unit stays at 0 with no winner until some path is active
                if z[j] > output[j] {
                    output[j] = z[j];
                    winner[j] = Some(p);
                }
            }
            inputs.push(x);
        }
        Ok(Trace {
            output,
            cache: Box::new(Cache { inputs, winner }),
        })
    }

    fn backward(&self, trace: &Trace, grad_output: &[f64], grads: &mut [Tensor]) {
        let cache = trace.cache.downcast_ref::<Cache>().expect("max-pool trace");
        let cols = self.dim * self.length;
        let (gw, gb) = grads.split_at_mut(1);
        for (j, w) in cache.winner.iter().enumerate() {
            if let Some(p) = *w {
                let g = grad_output[j];
                gb[0].data[j] += g;
                let row = &mut gw[0].data[j * cols..(j + 1) * cols];
                outer_add(row, cols, &[g], &cache.inputs[p]);
            }
        }
    }

    fn clone_box(&self) -> Box<dyn PathAggregator> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn identity_pool() -> DenseMaxPool {
        let spec = AggregatorSpec {
            dim: 2,
            path_length: 1,
            hidden: 2,
        };
        let mut agg = DenseMaxPool::new(&spec, &mut ChaCha8Rng::seed_from_u64(0));
        agg.params[0].data = vec![1.0, 0.0, 0.0, 1.0];
        agg.params[1].fill(0.0);
        agg
    }

    #[test]
    fn identity_weights_take_relu_max() {
        let t = EdgeVectors::new(2, vec![1.0, -3.0, 0.5, -1.0]).unwrap();
        let out = identity_pool().forward(&t, &[&[0], &[1]]).unwrap().output;
        assert_eq!(out, vec![1.0, 0.0]);
    }

    #[test]
    fn single_path_is_dense_relu() {
        let t = EdgeVectors::new(2, vec![2.0, -1.0]).unwrap();
        let mut agg = identity_pool();
        agg.params[1].data = vec![0.5, 3.0];
        let out = agg.forward(&t, &[&[0]]).unwrap().output;
        assert_eq!(out, vec![2.5, 2.0]);
    }

    #[test]
    fn permutation_invariant() {
        let spec = AggregatorSpec {
            dim: 3,
            path_length: 2,
            hidden: 6,
        };
        let agg = DenseMaxPool::new(&spec, &mut ChaCha8Rng::seed_from_u64(4));
        let t = EdgeVectors::new(3, (0..12).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let a = agg.forward(&t, &[&[0, 1], &[2, 3], &[1, 2]]).unwrap().output;
        let b = agg.forward(&t, &[&[1, 2], &[0, 1], &[2, 3]]).unwrap().output;
        assert_eq!(a, b);
    }
}
