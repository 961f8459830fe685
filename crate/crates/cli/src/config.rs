//! Flat `key = value` run configuration. Every key has a default; a config
//! file and then command-line flags override them in that order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ecne::embed::DimensionMode;
use ecne::linkpred::AggregatorRegistry;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classify,
    Cluster,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Label used in report rows; defaults to the input file stem.
    pub dataset: Option<String>,
    pub mode: DimensionMode,
    pub dim: usize,
    pub walks: usize,
    pub walk_len: usize,
    pub window: usize,
    pub neg: usize,
    pub sg_epochs: usize,
    pub epsilon: f64,
    pub agg: String,
    pub lengths: Vec<usize>,
    pub max_paths: usize,
    pub hidden: usize,
    pub lr: f64,
    pub epochs: usize,
    pub patience: usize,
    pub batch_size: usize,
    /// Train fraction for link prediction; `None` picks by graph size.
    pub split: Option<f64>,
    pub seed: u64,
    pub runs: usize,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub task: Option<Task>,
    pub fractions: Vec<f64>,
    pub embeddings: Option<PathBuf>,
    pub node_embeddings: Option<PathBuf>,
    pub dump_centrality: bool,
    pub dump_line_graph: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            dataset: None,
            mode: DimensionMode::Fixed,
            dim: 128,
            walks: 10,
            walk_len: 100,
            window: 10,
            neg: 100,
            sg_epochs: 5,
            epsilon: 1e-6,
            agg: "lstm".into(),
            lengths: vec![3, 4],
            max_paths: 100,
            hidden: 64,
            lr: 0.001,
            epochs: 50,
            patience: 5,
            batch_size: 32,
            split: None,
            seed: 1,
            runs: 5,
            threads: None,
            out: PathBuf::from("out"),
            task: None,
            fractions: (1..=9).map(|i| i as f64 / 10.0).collect(),
            embeddings: None,
            node_embeddings: None,
            dump_centrality: false,
            dump_line_graph: false,
        }
    }
}

pub const KEYS: &[&str] = &[
    "input",
    "dataset",
    "mode",
    "dim",
    "walks",
    "walk_len",
    "window",
    "neg",
    "sg_epochs",
    "epsilon",
    "agg",
    "lengths",
    "max_paths",
    "hidden",
    "lr",
    "epochs",
    "patience",
    "batch_size",
    "split",
    "seed",
    "runs",
    "threads",
    "out",
    "task",
    "fractions",
    "embeddings",
    "node_embeddings",
    "dump_centrality",
    "dump_line_graph",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse {value:?}")))
}

fn positive(key: &str, value: &str) -> Result<usize, CliError> {
    let n: usize = parse(key, value)?;
    if n == 0 {
        return Err(CliError::Usage(format!("{key} must be at least 1")));
    }
    Ok(n)
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    let items = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect::<Result<Vec<T>, _>>()?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("{key} needs at least one value")));
    }
    Ok(items)
}

fn fraction(key: &str, value: &str) -> Result<f64, CliError> {
    let f: f64 = parse(key, value)?;
    if !(f > 0.0 && f < 1.0) {
        return Err(CliError::Usage(format!("{key} must lie strictly between 0 and 1")));
    }
    Ok(f)
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "input" => self.input = Some(PathBuf::from(value)),
            "dataset" => self.dataset = Some(value.to_owned()),
            "mode" => {
                self.mode = value
                    .parse()
                    .map_err(|_| CliError::Usage(format!("mode must be ecne or ecne-d, got {value:?}")))?
            }
            "dim" => self.dim = positive(key, value)?,
            "walks" => self.walks = positive(key, value)?,
            "walk_len" => self.walk_len = positive(key, value)?,
            "window" => self.window = positive(key, value)?,
            "neg" => self.neg = parse(key, value)?,
            "sg_epochs" => self.sg_epochs = positive(key, value)?,
            "epsilon" => {
                let e: f64 = parse(key, value)?;
                if !(e > 0.0 && e.is_finite()) {
                    return Err(CliError::Usage("epsilon must be positive".into()));
                }
                self.epsilon = e;
            }
            "agg" => {
                let registry = AggregatorRegistry::builtin();
                if !registry.contains(value) {
                    return Err(CliError::Usage(format!(
                        "unknown aggregator {value:?}; available: {}",
                        registry.names().join(", ")
                    )));
                }
                self.agg = value.to_owned();
            }
            "lengths" => {
                let lengths: Vec<usize> = list(key, value)?;
                if lengths.iter().any(|&l| l < 2) {
                    return Err(CliError::Usage("path lengths must be at least 2".into()));
                }
                self.lengths = lengths;
            }
            "max_paths" => self.max_paths = positive(key, value)?,
            "hidden" => self.hidden = positive(key, value)?,
            "lr" => {
                let lr: f64 = parse(key, value)?;
                if !(lr > 0.0 && lr.is_finite()) {
                    return Err(CliError::Usage("lr must be positive".into()));
                }
                self.lr = lr;
            }
            "epochs" => self.epochs = parse(key, value)?,
            "patience" => self.patience = positive(key, value)?,
            "batch_size" => self.batch_size = positive(key, value)?,
            "split" => {
                self.split = match value {
                    "auto" => None,
                    v => Some(fraction(key, v)?),
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "runs" => self.runs = positive(key, value)?,
            "threads" => self.threads = Some(positive(key, value)?),
            "out" => self.out = PathBuf::from(value),
            "task" => {
                self.task = Some(match value {
                    "classify" => Task::Classify,
                    "cluster" => Task::Cluster,
                    other => {
                        return Err(CliError::Usage(format!(
                            "unknown task {other:?}; expected classify or cluster"
                        )))
                    }
                })
            }
            "fractions" => {
                self.fractions = list::<String>(key, value)?
                    .iter()
                    .map(|f| fraction(key, f))
                    .collect::<Result<_, _>>()?
            }
            "embeddings" => self.embeddings = Some(PathBuf::from(value)),
            "node_embeddings" => self.node_embeddings = Some(PathBuf::from(value)),
            "dump_centrality" => self.dump_centrality = parse(key, value)?,
            "dump_line_graph" => self.dump_line_graph = parse(key, value)?,
            _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Read a config file: one `key = value` per line, `#` comments.
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), n + 1)))?;
        }
        Ok(())
    }

    pub fn input(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Usage("no input graph given (--input or input = ...)".into()))
    }

    pub fn dataset_name(&self) -> String {
        self.dataset.clone().unwrap_or_else(|| {
            self.input
                .as_deref()
                .and_then(Path::file_stem)
                .map_or_else(|| "graph".to_owned(), |s| s.to_string_lossy().into_owned())
        })
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            DimensionMode::Fixed => "ecne",
            DimensionMode::Matched => "ecne-d",
        }
    }

    /// Canonical listing of every field, one `key=value` per line in key order.
    pub fn canonical(&self) -> String {
        let opt = |p: &Option<PathBuf>| p.as_ref().map_or(String::new(), |p| p.display().to_string());
        let join = |xs: &[String]| xs.join(",");
        let mut s = String::new();
        for key in KEYS {
            let value = match *key {
                "input" => opt(&self.input),
                "dataset" => self.dataset_name(),
                "mode" => self.mode_name().to_owned(),
                "dim" => self.dim.to_string(),
                "walks" => self.walks.to_string(),
                "walk_len" => self.walk_len.to_string(),
                "window" => self.window.to_string(),
                "neg" => self.neg.to_string(),
                "sg_epochs" => self.sg_epochs.to_string(),
                "epsilon" => format!("{:e}", self.epsilon),
                "agg" => self.agg.clone(),
                "lengths" => join(&self.lengths.iter().map(ToString::to_string).collect::<Vec<_>>()),
                "max_paths" => self.max_paths.to_string(),
                "hidden" => self.hidden.to_string(),
                "lr" => format!("{:e}", self.lr),
                "epochs" => self.epochs.to_string(),
                "patience" => self.patience.to_string(),
                "batch_size" => self.batch_size.to_string(),
                "split" => self.split.map_or("auto".to_owned(), |f| f.to_string()),
                "seed" => self.seed.to_string(),
                "runs" => self.runs.to_string(),
                "threads" => self.threads.map_or(String::new(), |t| t.to_string()),
                "out" => self.out.display().to_string(),
                "task" => match self.task {
                    Some(Task::Classify) => "classify".into(),
                    Some(Task::Cluster) => "cluster".into(),
                    None => String::new(),
                },
                "fractions" => join(&self.fractions.iter().map(ToString::to_string).collect::<Vec<_>>()),
                "embeddings" => opt(&self.embeddings),
                "node_embeddings" => opt(&self.node_embeddings),
                "dump_centrality" => self.dump_centrality.to_string(),
                "dump_line_graph" => self.dump_line_graph.to_string(),
                _ => unreachable!("every key is listed"),
            };
            let _ = writeln!(s, "{key}={value}");
        }
        s
    }

    /// SHA-256 of the canonical listing, hex encoded.
    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn walk_config(&self, seed: u64) -> ecne::embed::WalkConfig {
        ecne::embed::WalkConfig {
            walks_per_node: self.walks,
            walk_length: self.walk_len,
            window: self.window,
            negatives: self.neg,
            seed,
            epochs: self.sg_epochs,
            workers: self.threads.unwrap_or(1),
            ..Default::default()
        }
    }

    pub fn ecne_config(&self, seed: u64) -> ecne::embed::EcneConfig {
        ecne::embed::EcneConfig {
            mode: self.mode,
            d_fixed: self.dim,
            epsilon: self.epsilon,
            walk: self.walk_config(seed),
            ..Default::default()
        }
    }

    /// Seeds of the repeated runs: `seed, seed + 1, ...`.
    pub fn run_seeds(&self) -> Vec<u64> {
        (0..self.runs as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }
}
