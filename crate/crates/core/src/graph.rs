//! Undirected simple graphs over dense node ids.
//!
//! Raw node labels from an edge-list file are remapped onto `0..node_count`.
//! Every edge is stored once, with its endpoints ordered `(min, max)`, and
//! edge ids follow the lexicographic order of those pairs.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use log::warn;

use crate::error::{EcneError, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// One entry of a node's adjacency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Neighbor {
    pub node: NodeId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<Neighbor>>,
    dropped_self_loops: usize,
}

impl Graph {
    /// Builds a graph on `node_count` nodes labelled by their index.
    /// Self-loops are dropped and parallel edges collapsed.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Graph::with_labels(labels, edges)
    }

    pub fn with_labels<I>(labels: Vec<String>, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let node_count = labels.len();
        let mut canonical = BTreeSet::new();
        let mut dropped_self_loops = 0;
        for (u, v) in edges {
            for id in [u, v] {
                if id >= node_count {
                    return Err(EcneError::NodeOutOfRange { id, count: node_count });
                }
            }
            if u == v {
                dropped_self_loops += 1;
                continue;
            }
            canonical.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<(NodeId, NodeId)> = canonical.into_iter().collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for (edge, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push(Neighbor { node: v, edge });
            adjacency[v].push(Neighbor { node: u, edge });
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            labels,
            edges,
            adjacency,
            dropped_self_loops,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: EdgeId) -> (NodeId, NodeId) {
        self.edges[edge]
    }

    pub fn neighbors(&self, v: NodeId) -> &[Neighbor] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> Result<usize> {
        self.adjacency.get(v).map(Vec::len).ok_or(EcneError::NodeOutOfRange {
            id: v,
            count: self.node_count(),
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let list = self.adjacency.get(u)?;
        list.binary_search_by_key(&v, |n| n.node).ok().map(|i| list[i].edge)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Canonical line-node name `u_v` of an edge.
    pub fn edge_name(&self, edge: EdgeId) -> String {
        let (u, v) = self.edges[edge];
        format!("{u}_{v}")
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    /// Same node set, with the listed edges removed. Edge ids are reassigned.
    pub fn without_edges(&self, removed: &[(NodeId, NodeId)]) -> Graph {
        let removed: BTreeSet<(NodeId, NodeId)> = removed.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        let kept = self
            .edges
            .iter()
            .copied()
            .filter(|e| !removed.contains(e))
            .collect::<Vec<_>>();
        Graph::with_labels(self.labels.clone(), kept).expect("subgraph of a valid graph")
    }

    pub fn connected_components(&self) -> Components {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            label[root] = id;
            stack.push(root);
            while let Some(v) = stack.pop() {
                size += 1;
                for nb in &self.adjacency[v] {
                    if label[nb.node] == usize::MAX {
                        label[nb.node] = id;
                        stack.push(nb.node);
                    }
                }
            }
            sizes.push(size);
        }
        Components { label, sizes }
    }

    /// Writes the edge list in the same format `load_edge_list` reads.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for &(u, v) in &self.edges {
            writeln!(out, "{}\t{}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }

    /// Remap table: `raw_label<TAB>node_id`.
    pub fn write_remap<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (id, label) in self.labels.iter().enumerate() {
            writeln!(out, "{label}\t{id}")?;
        }
        Ok(())
    }
}

/// Connected-component labelling; component ids follow the smallest node in each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut groups = vec![Vec::new(); self.count()];
        for (v, &c) in self.label.iter().enumerate() {
            groups[c].push(v);
        }
        groups
    }
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| EcneError::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

/// Parses whitespace-separated label pairs; `#` starts a comment line.
/// When every label is a non-negative integer, ids follow numeric order;
/// otherwise they follow order of first appearance.
pub fn parse_edge_list<R: BufRead>(reader: R, path: &Path) -> Result<Graph> {
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| EcneError::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => raw.push((a.to_owned(), b.to_owned())),
            _ => {
                return Err(EcneError::Parse {
                    path: path.to_owned(),
                    line: i + 1,
                    message: format!("expected two node labels, got {trimmed:?}"),
                })
            }
        }
    }
    if raw.is_empty() {
        return Err(EcneError::EmptyGraph);
    }

    let mut labels: Vec<String> = Vec::new();
    let mut seen = HashMap::new();
    for (a, b) in &raw {
        for label in [a, b] {
            if !seen.contains_key(label) {
                seen.insert(label.clone(), labels.len());
                labels.push(label.clone());
            }
        }
    }
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().unwrap());
        seen = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    }

    let edges = raw.iter().map(|(a, b)| (seen[a], seen[b])).collect::<Vec<_>>();
    let graph = Graph::with_labels(labels, edges)?;
    if graph.dropped_self_loops() > 0 {
        warn!(
            "{}: dropped {} self-loop(s)",
            path.display(),
            graph.dropped_self_loops()
        );
    }
    if graph.edge_count() == 0 {
        return Err(EcneError::EmptyGraph);
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        parse_edge_list(text.as_bytes(), Path::new("<mem>"))
    }

    #[test]
    fn parses_simple_path() {
        let g = parse("0 1\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn deduplicates_and_canonicalizes() {
        let g = parse("0 1\n1 0\n0 1\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn drops_self_loops() {
        let g = parse("# header\n\n0 0\n0 1\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.dropped_self_loops(), 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("0 1\n1\n") {
            Err(EcneError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0 1 2\n"), Err(EcneError::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse("# nothing\n"), Err(EcneError::EmptyGraph)));
        assert!(matches!(parse("3 3\n"), Err(EcneError::EmptyGraph)));
    }

    #[test]
    fn string_labels_keep_first_appearance_order() {
        let g = parse("bob alice\nalice carol\n").unwrap();
        assert_eq!(g.labels(), &["bob", "alice", "carol"]);
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let g = parse("10 2\n2 1\n").unwrap();
        assert_eq!(g.labels(), &["1", "2", "10"]);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn degrees() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree(0).unwrap(), 3);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degree(0).unwrap(), 1);
        assert!(matches!(
            path.degree(3),
            Err(EcneError::NodeOutOfRange { id: 3, count: 3 })
        ));
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let c = g.connected_components();
        assert_eq!(c.count(), 2);
        assert_eq!(c.sizes, vec![3, 3]);
        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.connected_components().count(), 1);
    }

    #[test]
    fn edge_lookup_and_removal() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(g.edge_id(1, 0), Some(0));
        assert_eq!(g.edge_id(0, 2), None);
        let h = g.without_edges(&[(1, 0)]);
        assert_eq!(h.node_count(), 4);
        assert_eq!(h.edge_count(), 3);
        assert!(!h.has_edge(0, 1));
        assert_eq!(g.edge_name(3), "2_3");
    }
}
