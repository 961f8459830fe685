//! Current-flow betweenness.
//!
//! Each connected component is treated as a resistor network with unit
//! conductances. For a unit current injected at `s` and extracted at `t`, the
//! throughput of a node `x ∉ {s, t}` is half the sum of absolute currents on
//! its incident edges. `cb(x)` sums that throughput over unordered pairs
//! `{s, t}` inside the component of `x` (raw values, no normalization).
//!
//! With `C` the inverse of the Laplacian grounded at one node (padded with a
//! zero row and column for the ground), the current on edge `(v, w)` for the
//! pair `(s, t)` is `b(s) - b(t)` where `b(s) = C[v][s] - C[w][s]`. Summing
//! `|b(s) - b(t)|` over all pairs only needs `b` sorted once per edge.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{EcneError, Result};
use crate::graph::{Graph, NodeId};
use crate::linalg::{conjugate_gradient, Cholesky, SparseSymmetric};

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Which node of each component is grounded (removed from the Laplacian).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ground {
    First,
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense below `dense_threshold` nodes, conjugate gradient above.
    Auto,
    Dense,
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct CentralityOptions {
    pub ground: Ground,
    pub solver: Solver,
    pub dense_threshold: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CentralityOptions {
    fn default() -> Self {
        CentralityOptions {
            ground: Ground::First,
            solver: Solver::Auto,
            dense_threshold: 2000,
            tolerance: 1e-10,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    raw: Vec<f64>,
    values: Vec<f64>,
    epsilon: Option<f64>,
}

impl CentralityVector {
    pub fn from_raw(raw: Vec<f64>) -> CentralityVector {
        CentralityVector {
            values: raw.clone(),
            raw,
            epsilon: None,
        }
    }

    /// Values in use downstream (clamped, if `clamp` was applied).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn is_clamped(&self) -> bool {
        self.epsilon.is_some()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Floors every value at `epsilon`; the raw values are kept for reporting.
    pub fn clamp(&self, epsilon: f64) -> Result<CentralityVector> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(EcneError::InvalidArgument(format!(
                "clamp epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(CentralityVector {
            raw: self.raw.clone(),
            values: self.raw.iter().map(|&v| v.max(epsilon)).collect(),
            epsilon: Some(epsilon),
        })
    }

    /// Number of nodes whose raw value was raised by clamping.
    pub fn clamped_count(&self) -> usize {
        match self.epsilon {
            Some(eps) => self.raw.iter().filter(|&&v| v < eps).count(),
            None => 0,
        }
    }

    /// `node_id<TAB>cb` using the raw values.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (v, cb) in self.raw.iter().enumerate() {
            writeln!(out, "{v}\t{cb}")?;
        }
        Ok(())
    }
}

pub fn current_flow_betweenness(g: &Graph) -> Result<CentralityVector> {
    current_flow_betweenness_with(g, &CentralityOptions::default())
}

pub fn current_flow_betweenness_with(g: &Graph, options: &CentralityOptions) -> Result<CentralityVector> {
    if g.node_count() == 0 {
        return Err(EcneError::EmptyGraph);
    }
    let mut cb = vec![0.0; g.node_count()];
    for members in g.connected_components().members() {
        if members.len() < 2 {
            continue;
        }
        let local = component_betweenness(g, &members, options)?;
        for (&v, value) in members.iter().zip(local) {
            cb[v] = value;
        }
    }
    Ok(CentralityVector::from_raw(cb))
}

fn component_betweenness(g: &Graph, members: &[NodeId], options: &CentralityOptions) -> Result<Vec<f64>> {
    let k = members.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let ground = match options.ground {
        Ground::First => 0,
        Ground::Last => k - 1,
    };
    // reduced index: local index with the ground removed
    let reduced = |i: usize| {
        if i < ground {
            Some(i)
        } else if i == ground {
            None
        } else {
            Some(i - 1)
        }
    };

    let use_dense = match options.solver {
        Solver::Dense => true,
        Solver::ConjugateGradient => false,
        Solver::Auto => k <= options.dense_threshold,
    };

    let m = k - 1;
    // columns[s] = potentials (length k, ground entry zero) for unit injection at s
    let columns: Vec<Vec<f64>> = if use_dense {
        let mut lap = vec![0.0; m * m];
        for (i, &v) in members.iter().enumerate() {
            let Some(ri) = reduced(i) else { continue };
            lap[ri * m + ri] = g.neighbors(v).len() as f64;
            for nb in g.neighbors(v) {
                if let Some(rj) = reduced(local[nb.node]) {
                    lap[ri * m + rj] -= 1.0;
                }
            }
        }
        let chol = Cholesky::factor(&lap, m)?;
        (0..k)
            .into_par_iter()
            .map(|s| {
                let mut col = vec![0.0; m];
                if let Some(rs) = reduced(s) {
                    col[rs] = 1.0;
                    chol.solve_in_place(&mut col);
                }
                expand(col, ground)
            })
            .collect()
    } else {
        let mut row_start = vec![0];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for (i, &v) in members.iter().enumerate() {
            let Some(ri) = reduced(i) else { continue };
            let mut row: Vec<(usize, f64)> = vec![(ri, g.neighbors(v).len() as f64)];
            for nb in g.neighbors(v) {
                if let Some(rj) = reduced(local[nb.node]) {
                    row.push((rj, -1.0));
                }
            }
            row.sort_by_key(|e| e.0);
            for (c, val) in row {
                cols.push(c);
                values.push(val);
            }
            row_start.push(cols.len());
        }
        let lap = SparseSymmetric {
            n: m,
            row_start,
            cols,
            values,
        };
        (0..k)
            .into_par_iter()
            .map(|s| {
                let Some(rs) = reduced(s) else {
                    return Ok(vec![0.0; k]);
                };
                let mut rhs = vec![0.0; m];
                rhs[rs] = 1.0;
                let col = conjugate_gradient(&lap, &rhs, options.tolerance, options.max_iterations)?;
                Ok(expand(col, ground))
            })
            .collect::<Result<Vec<_>>>()?
    };

    // per edge: Σ_{s<t} |b(s) - b(t)|
    let local = &local;
    let edges: Vec<(usize, usize)> = members
        .iter()
        .flat_map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(move |nb| nb.node > v)
                .map(move |nb| (local[v], local[nb.node]))
        })
        .collect();
    let pair_sums: Vec<f64> = edges
        .par_iter()
        .map(|&(v, w)| {
            let mut b: Vec<f64> = (0..k).map(|s| columns[s][v] - columns[s][w]).collect();
            b.sort_by(f64::total_cmp);
            b.iter()
                .enumerate()
                .map(|(i, x)| (2.0 * i as f64 - (k as f64 - 1.0)) * x)
                .sum()
        })
        .collect();

    let mut incident = vec![0.0; k];
    for (&(v, w), s) in edges.iter().zip(&pair_sums) {
        incident[v] += s;
        incident[w] += s;
    }
    // endpoint pairs contribute exactly 1/2 each; remove them
    let endpoint_share = (k as f64 - 1.0) / 2.0;
    Ok(incident
        .into_iter()
        .map(|total| (0.5 * total - endpoint_share).max(0.0))
        .collect())
}

fn expand(reduced: Vec<f64>, ground: usize) -> Vec<f64> {
    let mut full = Vec::with_capacity(reduced.len() + 1);
    full.extend_from_slice(&reduced[..ground]);
    full.push(0.0);
    full.extend_from_slice(&reduced[ground..]);
    full
}
