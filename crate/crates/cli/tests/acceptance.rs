//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line. A criterion whose input data is not available is reported as
//! FAIL (blocked) without failing the run unless ECNE_STRICT_ACCEPTANCE is
//! set; any other FAIL makes the process exit non-zero.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use ecne::centrality::current_flow_betweenness;
use ecne::embed::{choose_dimension_for, ecne_pipeline, DimensionMode, EcneConfig, WalkConfig, DEFAULT_DIM};
use ecne::eval::{auc, f1_scores, kmeans, nmi, KMeansConfig};
use ecne::linegraph::{build_line_graph, size_estimate};
use ecne::linkpred::{
    run_experiment, AggregatorRegistry, AggregatorSpec, DenseMaxPool, ExperimentConfig, LinkModel, LstmMaxPool,
};
use ecne::{load_edge_list, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Blocked(String),
}

type Check = fn() -> Outcome;

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Outcome::Pass(format!("{detail} ({:.1}s)", took.as_secs_f64()))
    } else {
        Outcome::Fail(format!(
            "{detail}, but took {:.1}s, limit {}s",
            took.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn line_graph_sizes() -> Outcome {
    let start = Instant::now();
    for (name, g) in corpus().into_iter().chain([("karate", karate())]) {
        let lg = build_line_graph(&g);
        let got = (lg.node_count(), lg.edge_count());
        if got != size_estimate(&g) {
            return Outcome::Fail(format!("{name}: built {got:?}, estimate {:?}", size_estimate(&g)));
        }
    }
    let g = karate();
    let lg = build_line_graph(&g);
    let enumerated = line_edges_by_enumeration(&g);
    if lg.node_count() != 78 || lg.edge_count() != enumerated {
        return Outcome::Fail(format!(
            "karate line graph {} nodes, {} edges; enumeration {enumerated}",
            lg.node_count(),
            lg.edge_count()
        ));
    }
    within(
        Duration::from_secs(1),
        start,
        format!("corpus sizes exact; karate 78 line-nodes, {enumerated} line-edges"),
    )
}

fn centrality_oracle() -> Outcome {
    let start = Instant::now();
    let graphs = corpus()
        .into_iter()
        .map(|(name, g)| (name.to_owned(), g))
        .filter(|(_, g)| g.node_count() <= 8)
        .chain(
            random_connected(6, 50, 17)
                .into_iter()
                .enumerate()
                .map(|(i, g)| (format!("random #{i}"), g)),
        );
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (name, g) in graphs {
        let got = current_flow_betweenness(&g).unwrap();
        for (v, (a, b)) in got.raw().iter().zip(electrical_betweenness(&g)).enumerate() {
            let err = (a - b).abs();
            if err >= 1e-6 {
                return Outcome::Fail(format!("{name}: node {v}: {a} vs oracle {b}"));
            }
            worst = worst.max(err);
        }
        count += 1;
    }
    within(
        Duration::from_secs(30),
        start,
        format!("{count} graphs, max abs error {worst:.1e}"),
    )
}

fn gradient_suite() -> Outcome {
    let start = Instant::now();
    let fx = gradient_fixture();
    let spec = AggregatorSpec {
        dim: 3,
        path_length: 3,
        hidden: 4,
    };
    let mut reports = Vec::new();
    let mut max = DenseMaxPool::new(&spec, &mut ChaCha8Rng::seed_from_u64(1));
    reports.extend(aggregator_gradient_errors(&mut max, &fx.table, &fx.paths()));
    let mut lstm = LstmMaxPool::new(&spec, &mut ChaCha8Rng::seed_from_u64(1));
    reports.extend(aggregator_gradient_errors(&mut lstm, &fx.table, &fx.paths()));
    let registry = AggregatorRegistry::builtin();
    for name in ["max", "lstm"] {
        let mut model = LinkModel::new(&registry, name, 3, &[3], 4, 11).unwrap();
        for label in [0.0, 1.0] {
            reports.extend(model_gradient_errors(&mut model, &fx.table, &fx.bundle, label));
        }
    }
    let covered = ["edge.", "path.", "classifier"]
        .iter()
        .all(|tag| reports.iter().any(|(n, _)| n.contains(tag)));
    if !covered {
        return Outcome::Fail("missing LSTM level or classifier tensors in the report".into());
    }
    let (name, worst) = reports.iter().max_by(|a, b| a.1.total_cmp(&b.1)).cloned().unwrap();
    if worst >= FD_TOLERANCE {
        return Outcome::Fail(format!("{name}: relative error {worst:e}"));
    }
    within(
        Duration::from_secs(10),
        start,
        format!("{} tensors, worst relative error {worst:.1e} ({name})", reports.len()),
    )
}

fn skipgram_sanity() -> Outcome {
    let start = Instant::now();
    let k = 5;
    let g = barbell(k);
    let out = ecne_pipeline(&g, &EcneConfig::default()).unwrap();
    let side = |e: usize| {
        let (u, v) = g.endpoints(e);
        match (u < k, v < k) {
            (true, true) => Some(0),
            (false, false) => Some(1),
            _ => None,
        }
    };
    let (mut intra, mut cross) = ((0.0, 0), (0.0, 0));
    for a in 0..g.edge_count() {
        for b in a + 1..g.edge_count() {
            let (Some(sa), Some(sb)) = (side(a), side(b)) else {
                continue;
            };
            let slot = if sa == sb { &mut intra } else { &mut cross };
            slot.0 += cosine(out.embeddings.row(a), out.embeddings.row(b));
            slot.1 += 1;
        }
    }
    let (intra, cross) = (intra.0 / intra.1 as f64, cross.0 / cross.1 as f64);
    let detail = format!("intra {intra:.3}, cross {cross:.3}, gap {:.3}", intra - cross);
    if intra - cross < 0.2 {
        return Outcome::Fail(detail);
    }
    within(Duration::from_secs(30), start, detail)
}

fn dimension_rule() -> Outcome {
    let d = choose_dimension_for(6100, 9939, DimensionMode::Matched, DEFAULT_DIM);
    if d == 80 {
        Outcome::Pass("6100 nodes, 9939 edges -> d = 80".into())
    } else {
        Outcome::Fail(format!("6100 nodes, 9939 edges -> d = {d}"))
    }
}

/// Three blocks of 30 nodes; node `v` sits in block `v / 30`.
fn planted_blocks(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..90 {
        for v in u + 1..90 {
            let p = if u / 30 == v / 30 { 0.3 } else { 0.02 };
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(90, edges).unwrap()
}

fn clustering_recovery() -> Outcome {
    let start = Instant::now();
    let g = planted_blocks(7);
    let intra: Vec<(usize, usize)> = (0..g.edge_count())
        .filter_map(|e| {
            let (u, v) = g.endpoints(e);
            (u / 30 == v / 30).then_some((e, u / 30))
        })
        .collect();
    let truth: Vec<usize> = intra.iter().map(|&(_, b)| b).collect();
    let mut scores = Vec::new();
    for seed in 1..=5 {
        // shorter walks than the embedding defaults keep five runs inside the time budget
        let cfg = EcneConfig {
            walk: WalkConfig {
                walk_length: 40,
                window: 5,
                negatives: 5,
                seed,
                ..WalkConfig::default()
            },
            ..EcneConfig::default()
        };
        let out = ecne_pipeline(&g, &cfg).unwrap();
        let points: Vec<Vec<f64>> = intra
            .iter()
            .map(|&(e, _)| out.embeddings.row(e).iter().map(|&x| x as f64).collect())
            .collect();
        let fit = kmeans(&points, 3, seed, &KMeansConfig::default()).unwrap();
        scores.push(nmi(&fit.assignment, &truth).unwrap());
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let listed: Vec<String> = scores.iter().map(|s| format!("{s:.3}")).collect();
    let detail = format!(
        "{} edges, {} intra-block; NMI mean {mean:.3} over [{}]",
        g.edge_count(),
        intra.len(),
        listed.join(", ")
    );
    if mean < 0.8 {
        return Outcome::Fail(detail);
    }
    within(Duration::from_secs(120), start, detail)
}

fn usair_path() -> PathBuf {
    std::env::var_os("ECNE_USAIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| data_path("usair.edges"))
}

fn link_prediction() -> Outcome {
    let path = usair_path();
    if !path.exists() {
        return Outcome::Blocked(format!(
            "USAir edge list not found at {} (set ECNE_USAIR)",
            path.display()
        ));
    }
    let start = Instant::now();
    let g = load_edge_list(&path).unwrap();
    let registry = AggregatorRegistry::builtin();
    let cfg = ExperimentConfig::default();
    let mut aucs = Vec::new();
    for seed in 1..=5 {
        let run = run_experiment(&g, &cfg, &registry, seed).unwrap();
        aucs.push(run.auc);
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    let detail = format!(
        "{} nodes, {} edges; ECNE-LP-LSTM AUC mean {mean:.3} over {aucs:.3?}",
        g.node_count(),
        g.edge_count()
    );
    if mean < 0.90 {
        return Outcome::Fail(detail);
    }
    within(Duration::from_secs(15 * 60), start, detail)
}

fn metric_oracles() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let scores = [(0.9, 1.0), (0.8, 0.0), (0.7, 1.0), (0.7, 0.0), (0.2, 1.0)];
    let a = auc(&scores).unwrap();
    if !close(a, auc_by_pairs(&scores)) || !close(a, 5.0 / 12.0) {
        return Outcome::Fail(format!("AUC {a}, pairs {}", auc_by_pairs(&scores)));
    }
    let (x, y) = ([0, 0, 0, 1, 1, 1, 2, 2], [0, 0, 1, 1, 1, 2, 2, 2]);
    let n = nmi(&x, &y).unwrap();
    let direct = nmi_direct(&x, &y);
    if !close(n, direct) {
        return Outcome::Fail(format!("NMI {n}, direct formula {direct}"));
    }
    let f1 = f1_scores(&[0, 0, 1, 1, 2, 2], &[0, 1, 1, 1, 2, 0]);
    if !close(f1.micro, 2.0 / 3.0) || !close(f1.macro_, 59.0 / 90.0) {
        return Outcome::Fail(format!("F1 micro {}, macro {}", f1.micro, f1.macro_));
    }
    Outcome::Pass(format!(
        "AUC {a:.6}, NMI {n:.6}, micro-F1 {:.6}, macro-F1 {:.6}",
        f1.micro, f1.macro_
    ))
}

/// Mutual information over the arithmetic mean of the entropies, from the
/// contingency counts of labels below 3.
fn nmi_direct(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut joint = [[0.0; 3]; 3];
    for (&x, &y) in a.iter().zip(b) {
        joint[x][y] += 1.0 / n;
    }
    let pa: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let pb: Vec<f64> = (0..3).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let h = |p: &[f64]| -p.iter().filter(|&&q| q > 0.0).map(|q| q * q.ln()).sum::<f64>();
    let mut mi = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if joint[i][j] > 0.0 {
                mi += joint[i][j] * (joint[i][j] / (pa[i] * pb[j])).ln();
            }
        }
    }
    mi / ((h(&pa) + h(&pb)) / 2.0)
}

fn embed_once(out: &Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_ecne"))
        .arg("embed")
        .arg("--input")
        .arg(data_path("karate.edges"))
        .args([
            "--threads",
            "1",
            "--walk-len",
            "40",
            "--window",
            "5",
            "--neg",
            "5",
            "--seed",
            "3",
        ])
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("ecne embed exited with {status}"));
    }
    std::fs::read(out.join("embeddings.txt")).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let runs = embed_once(&dir.path().join("a")).and_then(|a| embed_once(&dir.path().join("b")).map(|b| (a, b)));
    match runs {
        Err(e) => Outcome::Fail(e),
        Ok((a, b)) if a != b => Outcome::Fail("embedding files differ".into()),
        Ok((a, _)) => within(
            Duration::from_secs(60),
            start,
            format!("two karate runs byte-identical ({} bytes)", a.len()),
        ),
    }
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("line graph sizes", line_graph_sizes),
        ("current-flow betweenness vs electrical oracle", centrality_oracle),
        ("finite-difference gradients", gradient_suite),
        ("skip-gram separates barbell cliques", skipgram_sanity),
        ("matched dimension rule", dimension_rule),
        ("planted-block clustering recovery", clustering_recovery),
        ("USAir link prediction", link_prediction),
        ("metric hand cases", metric_oracles),
        ("embed determinism", determinism),
    ];
    let strict = std::env::var_os("ECNE_STRICT_ACCEPTANCE").is_some();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        match outcome {
            Outcome::Pass(d) => println!("PASS criterion {}: {name}: {d}", i + 1),
            Outcome::Fail(d) => {
                println!("FAIL criterion {}: {name}: {d}", i + 1);
                failed += 1;
            }
            Outcome::Blocked(d) => {
                println!("FAIL criterion {}: {name}: blocked: {d}", i + 1);
                if strict {
                    failed += 1;
                }
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
