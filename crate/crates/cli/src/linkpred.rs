use std::collections::BTreeMap;
use std::io::Write;

use ecne::eval::{write_report, MetricReport};
use ecne::linkpred::{
    run_experiment, AdamConfig, AggregatorRegistry, ExperimentConfig, ExperimentRun, History, SplitPolicy, TrainConfig,
};
use ecne::Graph;
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::embed::{config_map, load_graph};
use crate::error::{CliError, Context};
use crate::output::{create_dir, write_json, write_with};

#[derive(Debug, Serialize)]
struct DatasetManifest {
    seed: u64,
    train_fraction: f64,
    train_positive: usize,
    train_negative: usize,
    test_positive: usize,
    test_negative: usize,
    training_graph_edges: usize,
    negatives_sha256: String,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    seed: u64,
    auc: f64,
    dim: usize,
    line_nodes: usize,
    line_edges: usize,
    parameters: usize,
    history: History,
}

#[derive(Debug, Serialize)]
pub struct LinkpredManifest {
    command: &'static str,
    config_digest: String,
    config: BTreeMap<String, String>,
    dataset: String,
    method: String,
    runs: Vec<RunSummary>,
    report: MetricReport,
}

pub fn method_name(cfg: &RunConfig) -> String {
    let base = match cfg.mode_name() {
        "ecne-d" => "ECNEd",
        _ => "ECNE",
    };
    format!("{base}-LP-{}", cfg.agg.to_uppercase())
}

pub fn experiment_config(cfg: &RunConfig) -> ExperimentConfig {
    ExperimentConfig {
        embedding: ecne::embed::EcneConfig {
            walk: ecne::embed::WalkConfig {
                // one run per worker thread; each run trains deterministically
                workers: 1,
                ..cfg.walk_config(cfg.seed)
            },
            ..cfg.ecne_config(cfg.seed)
        },
        aggregator: cfg.agg.clone(),
        lengths: cfg.lengths.clone(),
        max_paths: cfg.max_paths,
        hidden: cfg.hidden,
        training: TrainConfig {
            adam: AdamConfig {
                lr: cfg.lr,
                ..AdamConfig::default()
            },
            max_epochs: cfg.epochs,
            patience: cfg.patience,
            batch_size: cfg.batch_size,
            ..TrainConfig::default()
        },
        split: cfg.split.map_or(SplitPolicy::Auto, SplitPolicy::Fraction),
    }
}

fn negatives_digest(g: &Graph, run: &ExperimentRun) -> String {
    let mut pairs: Vec<_> = run.dataset.negatives().map(|e| (e.u, e.v)).collect();
    pairs.sort_unstable();
    let mut hasher = Sha256::new();
    for (u, v) in pairs {
        hasher.update(format!("{}\t{}\n", g.label(u), g.label(v)).as_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn write_run(g: &Graph, cfg: &RunConfig, run: &ExperimentRun) -> Result<(), CliError> {
    let dir = cfg.out.join(format!("seed{}", run.seed));
    create_dir(&dir)?;
    write_json(&dir.join("checkpoint.json"), &run.model.to_checkpoint())?;
    write_with(&dir.join("predictions.tsv"), |w| {
        writeln!(w, "u\tv\tlabel\teta")?;
        for (e, eta) in &run.predictions {
            writeln!(w, "{}\t{}\t{}\t{eta:.9}", g.label(e.u), g.label(e.v), e.label as u8)?;
        }
        Ok(())
    })?;
    let count = |xs: &[ecne::linkpred::LinkExample], label: f64| xs.iter().filter(|e| e.label == label).count();
    let d = &run.dataset;
    write_json(
        &dir.join("dataset.json"),
        &DatasetManifest {
            seed: run.seed,
            train_fraction: d.train_fraction,
            train_positive: count(&d.train, 1.0),
            train_negative: count(&d.train, 0.0),
            test_positive: count(&d.test, 1.0),
            test_negative: count(&d.test, 0.0),
            training_graph_edges: d.path_graph.edge_count(),
            negatives_sha256: negatives_digest(g, run),
        },
    )
}

pub fn run(cfg: &RunConfig) -> Result<LinkpredManifest, CliError> {
    let g = load_graph(cfg)?;
    create_dir(&cfg.out)?;
    let registry = AggregatorRegistry::builtin();
    let experiment = experiment_config(cfg);
    let runs = cfg
        .run_seeds()
        .into_par_iter()
        .map(|seed| run_experiment(&g, &experiment, &registry, seed).context("link prediction"))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &runs {
        write_run(&g, cfg, r)?;
    }

    let method = method_name(cfg);
    let aucs: Vec<f64> = runs.iter().map(|r| r.auc).collect();
    let report = MetricReport::from_runs("linkpred", &cfg.dataset_name(), &method, "AUC", &aucs).context("report")?;
    info!(
        "{method}: AUC {:.4} ± {:.4} over {} runs",
        report.value, report.stddev, report.runs
    );
    write_with(&cfg.out.join("report.tsv"), |w| {
        write_report(w, std::slice::from_ref(&report))
    })?;

    let manifest = LinkpredManifest {
        command: "linkpred",
        config_digest: cfg.digest(),
        config: config_map(cfg),
        dataset: cfg.dataset_name(),
        method,
        runs: runs
            .into_iter()
            .map(|r| RunSummary {
                seed: r.seed,
                auc: r.auc,
                dim: r.embedding.dim,
                line_nodes: r.embedding.line_nodes,
                line_edges: r.embedding.line_edges,
                parameters: r.model.parameter_count(),
                history: r.history,
            })
            .collect(),
        report,
    };
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
