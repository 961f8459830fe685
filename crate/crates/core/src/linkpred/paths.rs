//! Simple paths of exact length between a candidate node pair.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EcneError, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathSample {
    /// `l + 1` nodes, first `u`, last `v`.
    pub nodes: Vec<NodeId>,
    /// `l` edge ids in traversal order.
    pub edges: Vec<EdgeId>,
}

impl PathSample {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks simplicity, endpoints and that every edge joins consecutive nodes.
    pub fn is_valid_in(&self, g: &Graph, u: NodeId, v: NodeId) -> bool {
        let mut seen = self.nodes.clone();
        seen.sort_unstable();
        seen.dedup();
        self.nodes.len() == self.edges.len() + 1
            && seen.len() == self.nodes.len()
            && self.nodes.first() == Some(&u)
            && self.nodes.last() == Some(&v)
            && self
                .nodes
                .windows(2)
                .zip(&self.edges)
                .all(|(w, &e)| g.edge_id(w[0], w[1]) == Some(e))
    }
}

/// Per-length path lists for one candidate pair; each list sorted by node sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub u: NodeId,
    pub v: NodeId,
    pub by_length: Vec<(usize, Vec<PathSample>)>,
}

impl PathBundle {
    pub fn paths(&self, length: usize) -> &[PathSample] {
        self.by_length
            .iter()
            .find(|(l, _)| *l == length)
            .map_or(&[], |(_, p)| p.as_slice())
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.by_length.iter().map(|(l, _)| *l).collect()
    }

    pub fn total_paths(&self) -> usize {
        self.by_length.iter().map(|(_, p)| p.len()).sum()
    }
}

/// Enumerates simple `u → v` paths with exactly `length` edges. When more than
/// `max_paths` exist a uniform reservoir sample of `max_paths` is kept. The
/// result is sorted by node sequence.
pub fn find_paths(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    length: usize,
    max_paths: usize,
    seed: u64,
) -> Result<Vec<PathSample>> {
    if length < 1 {
        return Err(EcneError::InvalidArgument("path length must be >= 1".into()));
    }
    for id in [u, v] {
        if id >= g.node_count() {
            return Err(EcneError::NodeOutOfRange {
                id,
                count: g.node_count(),
            });
        }
    }
    if u == v {
        return Err(EcneError::InvalidArgument("path endpoints must differ".into()));
    }
    // the direct edge is never a candidate's own evidence
    if length == 1 || max_paths == 0 {
        return Ok(Vec::new());
    }

    let dist = distances_to(g, v, length);
    if dist[u] > length {
        return Ok(Vec::new());
    }
    let mut search = Search {
        g,
        target: v,
        length,
        dist,
        on_path: vec![false; g.node_count()],
        nodes: vec![u],
        edges: Vec::with_capacity(length),
        reservoir: Vec::new(),
        max_paths,
        seen: 0,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    search.on_path[u] = true;
    search.extend(u);
    let mut paths = search.reservoir;
    paths.sort();
    Ok(paths)
}

/// Paths for every requested length, each with its own derived seed.
pub fn build_bundle(
    g: &Graph,
    u: NodeId,
    v: NodeId,
    lengths: &[usize],
    max_paths: usize,
    seed: u64,
) -> Result<PathBundle> {
    let by_length = lengths
        .iter()
        .map(|&l| {
            let s = derive_seed(seed, &[u as u64, v as u64, l as u64]);
            find_paths(g, u, v, l, max_paths, s).map(|p| (l, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathBundle { u, v, by_length })
}

/// Hop distances to `target`, capped at `limit + 1`.
fn distances_to(g: &Graph, target: NodeId, limit: usize) -> Vec<usize> {
    let mut dist = vec![limit + 1; g.node_count()];
    dist[target] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(x) = queue.pop_front() {
        if dist[x] >= limit {
            continue;
        }
        for nb in g.neighbors(x) {
            if dist[nb.node] > dist[x] + 1 {
                dist[nb.node] = dist[x] + 1;
                queue.push_back(nb.node);
            }
        }
    }
    dist
}

struct Search<'a> {
    g: &'a Graph,
    target: NodeId,
    length: usize,
    dist: Vec<usize>,
    on_path: Vec<bool>,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
    reservoir: Vec<PathSample>,
    max_paths: usize,
    seen: usize,
    rng: ChaCha8Rng,
}

impl Search<'_> {
    fn extend(&mut self, at: NodeId) {
        let remaining = self.length - self.edges.len();
        for nb in self.g.neighbors(at) {
            let next = nb.node;
            if self.on_path[next] || self.dist[next] > remaining - 1 {
                continue;
            }
            if remaining == 1 {
                // dist == 0 here, so next is the target
                self.nodes.push(next);
                self.edges.push(nb.edge);
                self.offer();
                self.nodes.pop();
                self.edges.pop();
                continue;
            }
            if next == self.target {
                continue;
            }
            self.on_path[next] = true;
            self.nodes.push(next);
            self.edges.push(nb.edge);
            self.extend(next);
            self.nodes.pop();
            self.edges.pop();
            self.on_path[next] = false;
        }
    }

    fn offer(&mut self) {
        self.seen += 1;
        let sample = || PathSample {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
        };
        if self.reservoir.len() < self.max_paths {
            let p = sample();
            self.reservoir.push(p);
        } else {
            let j = self.rng.gen_range(0..self.seen);
            if j < self.max_paths {
                let p = sample();
                self.reservoir[j] = p;
            }
        }
    }
}
