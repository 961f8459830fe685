//! `ecne embed | linkpred | eval`.

mod config;
mod embed;
mod error;
mod eval;
mod linkpred;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "ecne", version, about = "Edge-centric network embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed the edges of a graph.
    Embed(Flags),
    /// Train and score path-based link predictors over repeated seeds.
    Linkpred(Flags),
    /// Edge classification or clustering against community labels.
    Eval(Flags),
}

/// Every flag is optional and overrides the same key from `--config`.
#[derive(Args)]
struct Flags {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    input: Option<String>,
    /// Name used in report rows.
    #[arg(long)]
    dataset: Option<String>,
    /// `ecne` (fixed dimension) or `ecne-d` (matched parameter budget).
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    /// Walks started from every line-graph node.
    #[arg(long)]
    walks: Option<String>,
    #[arg(long = "walk-len")]
    walk_len: Option<String>,
    #[arg(long)]
    window: Option<String>,
    /// Negative samples per positive pair.
    #[arg(long)]
    neg: Option<String>,
    /// Skip-gram epochs.
    #[arg(long = "sg-epochs")]
    sg_epochs: Option<String>,
    /// Path aggregator: avg, max or lstm.
    #[arg(long)]
    agg: Option<String>,
    /// Comma-separated path lengths.
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long = "max-paths")]
    max_paths: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    /// Link-prediction training epochs.
    #[arg(long)]
    epochs: Option<String>,
    /// Train fraction for link prediction, or `auto`.
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Number of repeated runs (seeds `seed..seed+runs`).
    #[arg(long)]
    runs: Option<String>,
    /// Worker threads; falls back to ECNE_THREADS.
    #[arg(long)]
    threads: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Evaluation task: classify or cluster.
    #[arg(long)]
    task: Option<String>,
    /// Comma-separated train fractions for the classification sweep.
    #[arg(long)]
    fractions: Option<String>,
    /// Existing edge embedding file to evaluate instead of embedding anew.
    #[arg(long)]
    embeddings: Option<String>,
    /// Node embedding file for the node-combination baselines.
    #[arg(long = "node-embeddings")]
    node_embeddings: Option<String>,
    #[arg(long = "dump-centrality")]
    dump_centrality: bool,
    #[arg(long = "dump-line-graph")]
    dump_line_graph: bool,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.load_file(path)?;
        }
        if let Ok(threads) = std::env::var("ECNE_THREADS") {
            if cfg.threads.is_none() {
                cfg.set("threads", &threads)
                    .map_err(|e| CliError::Usage(format!("ECNE_THREADS: {e}")))?;
            }
        }
        let flags = [
            ("input", &self.input),
            ("dataset", &self.dataset),
            ("mode", &self.mode),
            ("dim", &self.dim),
            ("walks", &self.walks),
            ("walk_len", &self.walk_len),
            ("window", &self.window),
            ("neg", &self.neg),
            ("sg_epochs", &self.sg_epochs),
            ("agg", &self.agg),
            ("lengths", &self.lengths),
            ("max_paths", &self.max_paths),
            ("lr", &self.lr),
            ("epochs", &self.epochs),
            ("split", &self.split),
            ("seed", &self.seed),
            ("runs", &self.runs),
            ("threads", &self.threads),
            ("out", &self.out),
            ("task", &self.task),
            ("fractions", &self.fractions),
            ("embeddings", &self.embeddings),
            ("node_embeddings", &self.node_embeddings),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.dump_centrality |= self.dump_centrality;
        cfg.dump_line_graph |= self.dump_line_graph;
        Ok(cfg)
    }
}

type Action = fn(&RunConfig) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (flags, action): (&Flags, Action) = match &cli.command {
        Command::Embed(f) => (f, |c| embed::run(c).map(drop)),
        Command::Linkpred(f) => (f, |c| linkpred::run(c).map(drop)),
        Command::Eval(f) => (f, |c| eval::run(c).map(drop)),
    };
    let cfg = flags.resolve()?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    action(&cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
