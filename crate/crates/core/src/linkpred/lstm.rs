//! Two-level LSTM aggregator.
//!
//! An edge-level LSTM reads each path's edge vectors and keeps its final
//! hidden state as the path representation. A path-level LSTM then reads
//! those representations in the given path order; its hidden states are
//! max-pooled element-wise.
//!
//! Gate blocks are stacked `[input, forget, candidate, output]` in every
//! `4H`-row weight and bias.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;

use super::aggregator::{check_paths, AggregatorSpec, EdgeVectors, PathAggregator, Trace};
use super::tensor::{matvec_add, matvec_t_add, outer_add, sigmoid, Tensor};
use crate::error::Result;
use crate::graph::EdgeId;

const EDGE_W: usize = 0;
const EDGE_U: usize = 1;
const EDGE_B: usize = 2;
const PATH_W: usize = 3;
const PATH_U: usize = 4;
const PATH_B: usize = 5;

#[derive(Debug, Clone)]
pub struct LstmMaxPool {
    dim: usize,
    length: usize,
    hidden: usize,
    params: Vec<Tensor>,
}

struct Step {
    /// activated gates, `4H`
    gates: Vec<f64>,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

struct Cache {
    /// edge vectors of the distinct edges, one projection computed per slot
    inputs: Vec<Vec<f64>>,
    path_slots: Vec<Vec<usize>>,
    edge_steps: Vec<Vec<Step>>,
    reps: Vec<Vec<f64>>,
    path_steps: Vec<Step>,
    /// step index holding the max for each unit
    argmax: Vec<usize>,
}

impl LstmMaxPool {
    pub const NAME: &'static str = "lstm";

    pub fn new(spec: &AggregatorSpec, rng: &mut ChaCha8Rng) -> LstmMaxPool {
        let h = spec.hidden;
        let bound = 1.0 / (h.max(1) as f64).sqrt();
        let l = spec.path_length;
        let mut edge_b = Tensor::zeros(format!("lstm{l}.edge.bias"), &[4 * h]);
        let mut path_b = Tensor::zeros(format!("lstm{l}.path.bias"), &[4 * h]);
        // forget gates start open
        edge_b.data[h..2 * h].iter_mut().for_each(|v| *v = 1.0);
        path_b.data[h..2 * h].iter_mut().for_each(|v| *v = 1.0);
        LstmMaxPool {
            dim: spec.dim,
            length: l,
            hidden: h,
            params: vec![
                Tensor::uniform(format!("lstm{l}.edge.input"), &[4 * h, spec.dim], bound, rng),
                Tensor::uniform(format!("lstm{l}.edge.recurrent"), &[4 * h, h], bound, rng),
                edge_b,
                Tensor::uniform(format!("lstm{l}.path.input"), &[4 * h, h], bound, rng),
                Tensor::uniform(format!("lstm{l}.path.recurrent"), &[4 * h, h], bound, rng),
                path_b,
            ],
        }
    }

    /// One cell update; `pre` already holds `W x + b` and is consumed.
    fn step(&self, mut pre: Vec<f64>, recurrent: usize, h_prev: &[f64], c_prev: &[f64]) -> (Step, Vec<f64>, Vec<f64>) {
        let h = self.hidden;
        matvec_add(&self.params[recurrent].data, h, h_prev, &mut pre);
        for v in &mut pre[..2 * h] {
            *v = sigmoid(*v);
        }
        for v in &mut pre[2 * h..3 * h] {
            *v = v.tanh();
        }
        for v in &mut pre[3 * h..] {
            *v = sigmoid(*v);
        }
        let mut c = vec![0.0; h];
        let mut tanh_c = vec![0.0; h];
        let mut out = vec![0.0; h];
        for j in 0..h {
            c[j] = pre[h + j] * c_prev[j] + pre[j] * pre[2 * h + j];
            tanh_c[j] = c[j].tanh();
            out[j] = pre[3 * h + j] * tanh_c[j];
        }
        let step = Step {
            gates: pre,
            h_prev: h_prev.to_vec(),
            c_prev: c_prev.to_vec(),
            tanh_c,
        };
        (step, out, c)
    }

    /// Backward through one cell. Returns the pre-activation gradient and
    /// updates `dh`/`dc` in place to the gradients w.r.t. the previous state.
    fn step_backward(
        &self,
        step: &Step,
        recurrent: usize,
        dh: &mut Vec<f64>,
        dc: &mut [f64],
        grads: &mut [Tensor],
    ) -> Vec<f64> {
        let h = self.hidden;
        let g = &step.gates;
        let mut dpre = vec![0.0; 4 * h];
        for j in 0..h {
            let (i, f, cand, o) = (g[j], g[h + j], g[2 * h + j], g[3 * h + j]);
            let tc = step.tanh_c[j];
            let dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
            dpre[j] = dcj * cand * i * (1.0 - i);
            dpre[h + j] = dcj * step.c_prev[j] * f * (1.0 - f);
            dpre[2 * h + j] = dcj * i * (1.0 - cand * cand);
            dpre[3 * h + j] = dh[j] * tc * o * (1.0 - o);
            dc[j] = dcj * f;
        }
        outer_add(&mut grads[recurrent].data, h, &dpre, &step.h_prev);
        let mut dh_prev = vec![0.0; h];
        matvec_t_add(&self.params[recurrent].data, h, &dpre, &mut dh_prev);
        *dh = dh_prev;
        dpre
    }
}

impl PathAggregator for LstmMaxPool {
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
        let h = self.hidden;

        let mut slot_of: HashMap<EdgeId, usize> = HashMap::new();
        let mut inputs: Vec<Vec<f64>> = Vec::new();
        let mut projections: Vec<Vec<f64>> = Vec::new();
        let path_slots: Vec<Vec<usize>> = paths
            .iter()
            .map(|path| {
                path.iter()
                    .map(|&e| {
                        *slot_of.entry(e).or_insert_with(|| {
                            let mut pre = self.params[EDGE_B].data.clone();
                            matvec_add(&self.params[EDGE_W].data, self.dim, table.row(e), &mut pre);
                            projections.push(pre);
                            inputs.push(table.row(e).to_vec());
                            inputs.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();

        let mut edge_steps = Vec::with_capacity(paths.len());
        let mut reps = Vec::with_capacity(paths.len());
        for ps in &path_slots {
            let mut hs = vec![0.0; h];
            let mut cs = vec![0.0; h];
            let mut steps = Vec::with_capacity(ps.len());
            for &slot in ps {
                let (step, h_next, c_next) = self.step(projections[slot].clone(), EDGE_U, &hs, &cs);
                steps.push(step);
                hs = h_next;
                cs = c_next;
            }
            edge_steps.push(steps);
            reps.push(hs);
        }

        let mut hs = vec![0.0; h];
        let mut cs = vec![0.0; h];
        let mut output = vec![f64::NEG_INFINITY; h];
        let mut argmax = vec![0; h];
        let mut path_steps = Vec::with_capacity(paths.len());
        for (p, rep) in reps.iter().enumerate() {
            let mut pre = self.params[PATH_B].data.clone();
            matvec_add(&self.params[PATH_W].data, h, rep, &mut pre);
            let (step, h_next, c_next) = self.step(pre, PATH_U, &hs, &cs);
            for j in 0..h {
                if h_next[j] > output[j] {
                    output[j] = h_next[j];
                    argmax[j] = p;
                }
            }
            path_steps.push(step);
            hs = h_next;
            cs = c_next;
        }

        Ok(Trace {
            output,
            cache: Box::new(Cache {
                inputs,
                path_slots,
                edge_steps,
                reps,
                path_steps,
                argmax,
            }),
        })
    }

    fn backward(&self, trace: &Trace, grad_output: &[f64], grads: &mut [Tensor]) {
        let cache = trace.cache.downcast_ref::<Cache>().expect("lstm trace");
        let h = self.hidden;
        let n = cache.path_steps.len();

        // path level
        let mut direct = vec![vec![0.0; h]; n];
        for (j, &p) in cache.argmax.iter().enumerate() {
            direct[p][j] += grad_output[j];
        }
        let mut dh = vec![0.0; h];
        let mut dc = vec![0.0; h];
        let mut drep = vec![vec![0.0; h]; n];
        for p in (0..n).rev() {
            for j in 0..h {
                dh[j] += direct[p][j];
            }
            let dpre = self.step_backward(&cache.path_steps[p], PATH_U, &mut dh, &mut dc, grads);
            outer_add(&mut grads[PATH_W].data, h, &dpre, &cache.reps[p]);
            for (b, d) in grads[PATH_B].data.iter_mut().zip(&dpre) {
                *b += d;
            }
            matvec_t_add(&self.params[PATH_W].data, h, &dpre, &mut drep[p]);
        }

        // edge level; input projections are shared per distinct edge
        let mut dproj = vec![vec![0.0; 4 * h]; cache.inputs.len()];
        for (p, steps) in cache.edge_steps.iter().enumerate() {
            let mut dh = drep[p].clone();
            let mut dc = vec![0.0; h];
            for (t, step) in steps.iter().enumerate().rev() {
                let dpre = self.step_backward(step, EDGE_U, &mut dh, &mut dc, grads);
                for (acc, d) in dproj[cache.path_slots[p][t]].iter_mut().zip(&dpre) {
                    *acc += d;
                }
            }
        }
        for (slot, d) in dproj.iter().enumerate() {
            for (b, v) in grads[EDGE_B].data.iter_mut().zip(d) {
                *b += v;
            }
            outer_add(&mut grads[EDGE_W].data, self.dim, d, &cache.inputs[slot]);
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

    fn spec(length: usize) -> AggregatorSpec {
        AggregatorSpec {
            dim: 3,
            path_length: length,
            hidden: 4,
        }
    }

    fn table() -> EdgeVectors {
        EdgeVectors::new(3, (0..15).map(|i| (i as f64 * 0.61).cos()).collect()).unwrap()
    }

    #[test]
    fn zero_parameters_give_zero_output() {
        let mut agg = LstmMaxPool::new(&spec(3), &mut ChaCha8Rng::seed_from_u64(0));
        agg.params.iter_mut().for_each(|t| t.fill(0.0));
        let out = agg.forward(&table(), &[&[0, 1, 2], &[3, 4, 0]]).unwrap().output;
        assert_eq!(out, vec![0.0; 4]);
    }

    #[test]
    fn one_edge_path_is_two_chained_cells() {
        let agg = LstmMaxPool::new(&spec(1), &mut ChaCha8Rng::seed_from_u64(2));
        let t = table();
        let out = agg.forward(&t, &[&[2]]).unwrap().output;

        // independent single-step evaluation with zero initial state
        let cell = |w: &Tensor, b: &Tensor, x: &[f64]| -> Vec<f64> {
            let h = 4;
            let cols = x.len();
            let pre: Vec<f64> = (0..4 * h)
                .map(|r| b.data[r] + (0..cols).map(|c| w.data[r * cols + c] * x[c]).sum::<f64>())
                .collect();
            let s = |v: f64| 1.0 / (1.0 + (-v).exp());
            (0..h)
                .map(|j| {
                    let c = s(pre[j]) * pre[2 * h + j].tanh();
                    s(pre[3 * h + j]) * c.tanh()
                })
                .collect()
        };
        let rep = cell(&agg.params[EDGE_W], &agg.params[EDGE_B], t.row(2));
        let expected = cell(&agg.params[PATH_W], &agg.params[PATH_B], &rep);
        for (a, b) in out.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn order_of_paths_matters_only_through_the_second_level() {
        let agg = LstmMaxPool::new(&spec(2), &mut ChaCha8Rng::seed_from_u64(5));
        let t = table();
        let a = agg.forward(&t, &[&[0, 1], &[2, 3]]).unwrap().output;
        let b = agg.forward(&t, &[&[0, 1], &[2, 3]]).unwrap().output;
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.abs() < 1.0));
    }
}
