//! Fixture graphs and independent reference computations shared by the
//! integration tests. Nothing here calls into the solver, path finder or
//! metric code it is used to check.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use ecne::linkpred::{build_bundle, EdgeVectors, LinkModel, PathAggregator, PathBundle, Tensor};
use ecne::{load_edge_list, EdgeId, Graph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied()).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    graph(n, &edges)
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    graph(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph(n, &edges)
}

/// Center 0 with `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    graph(leaves + 1, &edges)
}

/// Two `k`-cliques on `0..k` and `k..2k` joined by the edge `(k-1, k)`.
pub fn barbell(k: usize) -> Graph {
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.push((k - 1, k));
    graph(2 * k, &edges)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn karate() -> Graph {
    load_edge_list(data_path("karate.edges")).unwrap()
}

/// The small fixture corpus: K3, P3, S3, S4, C4, K4 and the 5-clique barbell.
pub fn corpus() -> Vec<(&'static str, Graph)> {
    vec![
        ("K3", complete(3)),
        ("P3", path(3)),
        ("S3", star(3)),
        ("S4", star(4)),
        ("C4", cycle(4)),
        ("K4", complete(4)),
        ("barbell", barbell(5)),
    ]
}

pub fn is_connected(g: &Graph) -> bool {
    g.connected_components().count() == 1
}

/// `count` distinct connected graphs on `n` nodes, each edge kept with
/// probability one half.
pub fn random_connected(n: usize, count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        if edges.is_empty() {
            continue;
        }
        let g = graph(n, &edges);
        if is_connected(&g) && seen.insert(edges) {
            out.push(g);
        }
    }
    out
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Current-flow betweenness by direct simulation: for every unordered pair
/// `(s, t)` inject a unit current at `s`, extract it at `t`, solve for the
/// node potentials, and credit every other node with half the absolute
/// current on its incident edges. Graph must be connected.
pub fn electrical_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut total = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            // ground t; unknowns are the other potentials
            let index: Vec<Option<usize>> = (0..n)
                .scan(0, |next, v| {
                    Some((v != t).then(|| {
                        *next += 1;
                        *next - 1
                    }))
                })
                .collect();
            let mut a = vec![vec![0.0; n - 1]; n - 1];
            let mut b = vec![0.0; n - 1];
            for &(u, v) in g.edges() {
                for (x, y) in [(u, v), (v, u)] {
                    if let Some(i) = index[x] {
                        a[i][i] += 1.0;
                        if let Some(j) = index[y] {
                            a[i][j] -= 1.0;
                        }
                    }
                }
            }
            b[index[s].unwrap()] = 1.0;
            let x = gauss_solve(a, b);
            let potential = |v: usize| index[v].map_or(0.0, |i| x[i]);
            for v in (0..n).filter(|&v| v != s && v != t) {
                let through: f64 = g
                    .neighbors(v)
                    .iter()
                    .map(|nb| (potential(v) - potential(nb.node)).abs())
                    .sum();
                total[v] += 0.5 * through;
            }
        }
    }
    total
}

/// Line-graph edge count by checking every pair of edges for a shared endpoint.
pub fn line_edges_by_enumeration(g: &Graph) -> usize {
    let edges = g.edges();
    let mut count = 0;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = (edges[i], edges[j]);
            if a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1 {
                count += 1;
            }
        }
    }
    count
}

/// Every simple path from `u` to `v` with exactly `l` edges, as node
/// sequences, by unpruned depth-first enumeration.
pub fn brute_force_paths(g: &Graph, u: NodeId, v: NodeId, l: usize) -> BTreeSet<Vec<NodeId>> {
    fn extend(g: &Graph, stack: &mut Vec<NodeId>, v: NodeId, l: usize, out: &mut BTreeSet<Vec<NodeId>>) {
        let last = *stack.last().unwrap();
        if stack.len() == l + 1 {
            if last == v {
                out.insert(stack.clone());
            }
            return;
        }
        for w in 0..g.node_count() {
            if g.has_edge(last, w) && !stack.contains(&w) {
                stack.push(w);
                extend(g, stack, v, l, out);
                stack.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    extend(g, &mut vec![u], v, l, &mut out);
    out
}

/// Newman modularity straight from the definition
/// `Q = 1/2m Σ_ij (A_ij − k_i k_j / 2m) δ(c_i, c_j)`.
pub fn modularity_by_definition(g: &Graph, labels: &[usize]) -> f64 {
    let n = g.node_count();
    let m2 = 2.0 * g.edge_count() as f64;
    let k: Vec<f64> = (0..n).map(|v| g.neighbors(v).len() as f64).collect();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                q += a - k[i] * k[j] / m2;
            }
        }
    }
    q / m2
}

/// AUC by comparing every positive with every negative.
pub fn auc_by_pairs(scores: &[(f64, f64)]) -> f64 {
    let pos: Vec<f64> = scores.iter().filter(|s| s.1 > 0.5).map(|s| s.0).collect();
    let neg: Vec<f64> = scores.iter().filter(|s| s.1 <= 0.5).map(|s| s.0).collect();
    let mut credit = 0.0;
    for p in &pos {
        for n in &neg {
            credit += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    credit / (pos.len() * neg.len()) as f64
}

pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
    let na: f64 = a.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
    dot / (na * nb)
}

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOLERANCE: f64 = 1e-4;

/// Relative error with an absolute floor so that exact zeros compare cleanly.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

pub struct GradientFixture {
    pub graph: Graph,
    pub table: EdgeVectors,
    pub bundle: PathBundle,
}

impl GradientFixture {
    pub fn paths(&self) -> Vec<Vec<EdgeId>> {
        self.bundle.paths(3).iter().map(|p| p.edges.clone()).collect()
    }
}

/// Two disjoint three-edge paths from 0 to 5, with random 3-dimensional
/// edge vectors.
pub fn gradient_fixture() -> GradientFixture {
    let graph = graph(6, &[(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)]);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let data: Vec<f64> = (0..graph.edge_count() * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let table = EdgeVectors::new(3, data).unwrap();
    let bundle = build_bundle(&graph, 0, 5, &[3], 100, 0).unwrap();
    assert_eq!(bundle.paths(3).len(), 2);
    GradientFixture { graph, table, bundle }
}

/// Largest relative error between the analytic gradient of
/// `Σ_i c_i · output_i` and its central finite difference, over every
/// parameter entry, reported per tensor name.
pub fn aggregator_gradient_errors(
    agg: &mut dyn PathAggregator,
    table: &EdgeVectors,
    paths: &[Vec<EdgeId>],
) -> Vec<(String, f64)> {
    let refs: Vec<&[EdgeId]> = paths.iter().map(Vec::as_slice).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let coeffs: Vec<f64> = (0..agg.output_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let objective = |agg: &dyn PathAggregator| -> f64 {
        let t = agg.forward(table, &refs).unwrap();
        t.output.iter().zip(&coeffs).map(|(o, c)| o * c).sum()
    };
    let trace = agg.forward(table, &refs).unwrap();
    let mut grads: Vec<Tensor> = agg.params().iter().map(Tensor::zeros_like).collect();
    agg.backward(&trace, &coeffs, &mut grads);

    let mut report = Vec::new();
    for k in 0..grads.len() {
        let mut worst: f64 = 0.0;
        for i in 0..grads[k].data.len() {
            let original = agg.params()[k].data[i];
            agg.params_mut()[k].data[i] = original + FD_STEP;
            let up = objective(agg);
            agg.params_mut()[k].data[i] = original - FD_STEP;
            let down = objective(agg);
            agg.params_mut()[k].data[i] = original;
            let numeric = (up - down) / (2.0 * FD_STEP);
            worst = worst.max(relative_error(grads[k].data[i], numeric));
        }
        report.push((agg.params()[k].name.clone(), worst));
    }
    report
}

/// Same check for the full model under binary cross-entropy.
pub fn model_gradient_errors(
    model: &mut LinkModel,
    table: &EdgeVectors,
    bundle: &PathBundle,
    label: f64,
) -> Vec<(String, f64)> {
    let loss = |m: &LinkModel| -> f64 {
        let eta = m.predict(table, bundle).unwrap();
        -(label * eta.ln() + (1.0 - label) * (1.0 - eta).ln())
    };
    // a zero classifier would hide every aggregator gradient
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let last = model.params().len() - 2;
    for x in &mut model.params_mut()[last].data {
        *x = rng.gen_range(-1.0..1.0);
    }
    let fwd = model.forward(table, bundle).unwrap();
    let mut grads = model.zero_grads();
    model.backward(&fwd, fwd.eta - label, &mut grads);
    let mut report = Vec::new();
    for k in 0..grads.tensors.len() {
        let mut worst: f64 = 0.0;
        for i in 0..grads.tensors[k].data.len() {
            let original = model.params()[k].data[i];
            model.params_mut()[k].data[i] = original + FD_STEP;
            let up = loss(model);
            model.params_mut()[k].data[i] = original - FD_STEP;
            let down = loss(model);
            model.params_mut()[k].data[i] = original;
            let numeric = (up - down) / (2.0 * FD_STEP);
            worst = worst.max(relative_error(grads.tensors[k].data[i], numeric));
        }
        report.push((grads.tensors[k].name.clone(), worst));
    }
    report
}
