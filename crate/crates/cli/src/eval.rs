use std::collections::BTreeMap;
use std::io::Write;

use ecne::embed::EmbeddingMatrix;
use ecne::eval::{
    classify, combine_node_embeddings, detect_communities, edge_features, kmeans, label_edges, nmi, write_report,
    CombineOp, KMeansConfig, LogisticConfig, MetricReport,
};
use ecne::EcneError;
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, Task};
use crate::embed::{config_map, embed_graph, load_graph};
use crate::error::{CliError, Context};
use crate::output::{create_dir, write_json, write_with};

#[derive(Debug, Serialize)]
pub struct EvalManifest {
    command: &'static str,
    config_digest: String,
    config: BTreeMap<String, String>,
    task: &'static str,
    communities: usize,
    modularity: f64,
    labeled_edges: usize,
    excluded_edges: usize,
    pub rows: Vec<MetricReport>,
}

pub fn run(cfg: &RunConfig) -> Result<EvalManifest, CliError> {
    let task = cfg
        .task
        .ok_or_else(|| CliError::Usage("eval needs --task classify or --task cluster".into()))?;
    let g = load_graph(cfg)?;
    create_dir(&cfg.out)?;

    let primary = match &cfg.embeddings {
        Some(path) => EmbeddingMatrix::load(path).context("loading embeddings")?,
        None => {
            let out = embed_graph(&g, cfg, cfg.seed)?;
            write_with(&cfg.out.join("embeddings.txt"), |w| out.embeddings.write_text(w))?;
            out.embeddings
        }
    };
    let mut methods = vec![(
        if cfg.mode_name() == "ecne-d" { "ECNEd" } else { "ECNE" }.to_owned(),
        primary,
    )];
    if let Some(path) = &cfg.node_embeddings {
        let nodes = EmbeddingMatrix::load(path).context("loading node embeddings")?;
        for op in CombineOp::ALL {
            let edges = combine_node_embeddings(&nodes, &g, op).context("combining node embeddings")?;
            methods.push((format!("nodes-{op}"), edges));
        }
    }

    let partition = detect_communities(&g);
    let labeling = label_edges(&g, &partition);
    let labeled = labeling.labeled();
    info!(
        "{} communities, modularity {:.4}; {} intra-community edges, {} excluded",
        partition.count(),
        partition.modularity,
        labeled.len(),
        labeling.excluded().len()
    );
    write_with(&cfg.out.join("communities.tsv"), |w| {
        for (v, c) in partition.labels.iter().enumerate() {
            writeln!(w, "{}\t{c}", g.label(v))?;
        }
        Ok(())
    })?;
    if labeled.is_empty() {
        return Err(CliError::Usage("no intra-community edges to evaluate".into()));
    }
    let edges: Vec<usize> = labeled.iter().map(|&(e, _)| e).collect();
    let truth: Vec<usize> = labeled.iter().map(|&(_, c)| c).collect();
    let dataset = cfg.dataset_name();
    let seeds = cfg.run_seeds();

    let mut rows = Vec::new();
    for (method, matrix) in &methods {
        let features = edge_features(matrix, &g, &edges).context("edge features")?;
        match task {
            Task::Classify => {
                for &fraction in &cfg.fractions {
                    let outcomes = seeds
                        .par_iter()
                        .map(|&s| classify(&features, &truth, fraction, s, &LogisticConfig::default()))
                        .collect::<Result<Vec<_>, EcneError>>()
                        .context("classification")?;
                    for o in &outcomes {
                        if (o.f1.micro - o.accuracy).abs() > 1e-12 {
                            return Err(CliError::Ecne {
                                context: "classification",
                                source: EcneError::Shape(format!(
                                    "micro-F1 {} differs from accuracy {}",
                                    o.f1.micro, o.accuracy
                                )),
                            });
                        }
                    }
                    let task_name = format!("classify@{fraction}");
                    let micro: Vec<f64> = outcomes.iter().map(|o| o.f1.micro).collect();
                    let macro_: Vec<f64> = outcomes.iter().map(|o| o.f1.macro_).collect();
                    for (metric, values) in [("micro-F1", micro), ("macro-F1", macro_)] {
                        rows.push(
                            MetricReport::from_runs(&task_name, &dataset, method, metric, &values).context("report")?,
                        );
                    }
                }
            }
            Task::Cluster => {
                let mut classes = truth.clone();
                classes.sort_unstable();
                classes.dedup();
                let k = classes.len();
                if k < 2 {
                    warn!("only one community has internal edges; NMI is trivially defined");
                }
                let values = seeds
                    .par_iter()
                    .map(|&s| {
                        let c = kmeans(&features, k, s, &KMeansConfig::default())?;
                        nmi(&c.assignment, &truth)
                    })
                    .collect::<Result<Vec<_>, EcneError>>()
                    .context("clustering")?;
                rows.push(MetricReport::from_runs("cluster", &dataset, method, "NMI", &values).context("report")?);
            }
        }
    }
    for r in &rows {
        info!("{}", r.tsv_row());
    }
    write_with(&cfg.out.join("report.tsv"), |w| write_report(w, &rows))?;

    let manifest = EvalManifest {
        command: "eval",
        config_digest: cfg.digest(),
        config: config_map(cfg),
        task: match task {
            Task::Classify => "classify",
            Task::Cluster => "cluster",
        },
        communities: partition.count(),
        modularity: partition.modularity,
        labeled_edges: labeled.len(),
        excluded_edges: labeling.excluded().len(),
        rows,
    };
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
