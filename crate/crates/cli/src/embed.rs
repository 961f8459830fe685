use std::collections::BTreeMap;
use std::path::PathBuf;

use ecne::centrality::current_flow_betweenness_with;
use ecne::embed::{ecne_pipeline, EcneOutput};
use ecne::linegraph::build_line_graph;
use ecne::{load_edge_list, Graph};
use log::info;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::output::{create_dir, write_json, write_with};

#[derive(Debug, Serialize)]
pub struct EmbedManifest {
    pub command: &'static str,
    pub config_digest: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub dataset: String,
    pub mode: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub line_nodes: usize,
    pub line_edges: usize,
    pub dim: usize,
    pub walks: usize,
    pub clamped_nodes: usize,
    pub epoch_losses: Vec<f64>,
    pub timings_seconds: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

pub fn config_map(cfg: &RunConfig) -> BTreeMap<String, String> {
    cfg.canonical()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_owned(), v.to_owned()))
        .collect()
}

pub fn load_graph(cfg: &RunConfig) -> Result<Graph, CliError> {
    let path = cfg.input()?;
    let g = load_edge_list(path).context("loading graph")?;
    info!(
        "loaded {}: {} nodes, {} edges",
        path.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(g)
}

pub fn embed_graph(g: &Graph, cfg: &RunConfig, seed: u64) -> Result<EcneOutput, CliError> {
    let out = ecne_pipeline(g, &cfg.ecne_config(seed)).context("embedding")?;
    let s = &out.stats;
    info!(
        "line graph {} nodes, {} edges; d = {}; {} walks",
        s.line_nodes, s.line_edges, s.dim, s.walks
    );
    if s.clamped_nodes > 0 {
        info!(
            "{} nodes had zero centrality and were clamped to {:e}",
            s.clamped_nodes, cfg.epsilon
        );
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<EmbedManifest, CliError> {
    let g = load_graph(cfg)?;
    create_dir(&cfg.out)?;
    let out = embed_graph(&g, cfg, cfg.seed)?;

    let mut files = Vec::new();
    let mut emit = |name: &str| -> PathBuf {
        files.push(name.to_owned());
        cfg.out.join(name)
    };
    write_with(&emit("embeddings.txt"), |w| out.embeddings.write_text(w))?;
    write_with(&emit("remap.tsv"), |w| g.write_remap(w))?;
    if cfg.dump_centrality || cfg.dump_line_graph {
        // recomputed here so the pipeline itself stays a single call
        let cb = current_flow_betweenness_with(&g, &Default::default())
            .and_then(|cb| cb.clamp(cfg.epsilon))
            .context("centrality")?;
        if cfg.dump_centrality {
            write_with(&emit("centrality.tsv"), |w| cb.write_tsv(w))?;
        }
        if cfg.dump_line_graph {
            let lg = build_line_graph(&g).weight_edges(&cb).context("line graph")?;
            write_with(&emit("line_graph.tsv"), |w| lg.write_weighted_edges(w))?;
        }
    }
    files.push("manifest.json".to_owned());

    let s = out.stats;
    let manifest = EmbedManifest {
        command: "embed",
        config_digest: cfg.digest(),
        config: config_map(cfg),
        seed: cfg.seed,
        dataset: cfg.dataset_name(),
        mode: cfg.mode_name(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        line_nodes: s.line_nodes,
        line_edges: s.line_edges,
        dim: s.dim,
        walks: s.walks,
        clamped_nodes: s.clamped_nodes,
        epoch_losses: s.epoch_losses,
        timings_seconds: s
            .timings
            .iter()
            .map(|(k, d)| ((*k).to_owned(), d.as_secs_f64()))
            .collect(),
        files,
    };
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    info!("wrote {}", cfg.out.display());
    Ok(manifest)
}
