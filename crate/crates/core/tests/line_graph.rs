mod common;

use common::*;
use ecne::centrality::current_flow_betweenness;
use ecne::linegraph::{build_line_graph, size_estimate};
use proptest::prelude::*;

#[test]
fn corpus_sizes_match_degree_formula() {
    for (name, g) in corpus().into_iter().chain([("karate", karate())]) {
        let lg = build_line_graph(&g);
        assert_eq!((lg.node_count(), lg.edge_count()), size_estimate(&g), "{name}");
        assert_eq!(lg.edge_count(), line_edges_by_enumeration(&g), "{name}");
    }
}

#[test]
fn karate_line_graph() {
    let g = karate();
    assert_eq!((g.node_count(), g.edge_count()), (34, 78));
    let lg = build_line_graph(&g);
    assert_eq!(lg.node_count(), 78);
    let squares: usize = g.degrees().iter().map(|d| d * d).sum();
    assert_eq!(lg.edge_count(), squares / 2 - 78);
    assert_eq!(lg.edge_count(), line_edges_by_enumeration(&g));
}

#[test]
fn adjacency_means_a_shared_endpoint() {
    let g = karate();
    let lg = build_line_graph(&g);
    for a in 0..g.edge_count() {
        for b in 0..g.edge_count() {
            let (p, q) = (g.endpoints(a), g.endpoints(b));
            let share = a != b && (p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1);
            assert_eq!(lg.has_edge(a, b), share);
        }
    }
}

#[test]
fn weights_are_inverse_centrality_sums() {
    let g = barbell(4);
    let cb = current_flow_betweenness(&g).unwrap().clamp(1e-6).unwrap();
    let lg = build_line_graph(&g).weight_edges(&cb).unwrap();
    for e in lg.edges() {
        let (a, b) = (g.endpoints(e.a), g.endpoints(e.b));
        let outer_a = if a.0 == e.shared { a.1 } else { a.0 };
        let outer_b = if b.0 == e.shared { b.1 } else { b.0 };
        let want = [outer_a, e.shared, outer_b]
            .iter()
            .map(|&v| 1.0 / cb.values()[v])
            .sum::<f64>();
        assert!((e.weight - want).abs() <= 1e-12 * want);
    }
}

proptest! {
    #[test]
    fn random_graph_sizes(seed in 0u64..5000, n in 3usize..10) {
        let g = &random_connected(n, 1, seed)[0];
        let lg = build_line_graph(g);
        prop_assert_eq!((lg.node_count(), lg.edge_count()), size_estimate(g));
        prop_assert_eq!(lg.edge_count(), line_edges_by_enumeration(g));
    }
}
