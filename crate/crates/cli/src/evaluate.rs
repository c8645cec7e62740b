use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use proxemb::eval::{classify_graphs, classify_nodes, cluster_nodes};
use proxemb::graph::{load_edge_list, parse_labels};
use proxemb::{EmbeddingKind, EmbeddingMatrix, EvalReport, GraphFeatureVector, NodeIds, PipelineConfig};

use crate::embed::{embed_nodes, graph_features, GraphEmbedOptions};
use crate::failure::{CliResult, Failure};
use crate::io::{create, load_dataset, read_text, Table};
use crate::options::ConfigArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    NodeClassify,
    NodeCluster,
    GraphClassify,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Edge list to embed with the selected pipeline.
    #[arg(long, conflicts_with_all = ["input", "dataset"])]
    pub graph: Option<PathBuf>,
    /// Dataset directory (`index.txt`, `labels.txt`) for graph-classify.
    #[arg(long, conflicts_with = "input")]
    pub dataset: Option<PathBuf>,
    /// Precomputed feature table written by node-embed or graph-embed.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// `id label` file. Required for node tasks; optional when the dataset
    /// has its own labels.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub weighted: bool,
    /// Number of clusters for node-cluster; defaults to the number of labels.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Seed for the evaluation splits.
    #[arg(long = "eval-seed", default_value_t = 0)]
    pub eval_seed: u64,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

fn read_labels(path: &Option<PathBuf>, ids: &NodeIds) -> CliResult<Vec<i64>> {
    let path = path
        .as_ref()
        .ok_or_else(|| Failure::usage("--labels is required for this input"))?;
    Ok(parse_labels(&read_text(path)?, ids)?)
}

pub fn distinct(labels: &[i64]) -> usize {
    labels.iter().collect::<BTreeSet<_>>().len()
}

fn node_inputs(args: &EvalArgs) -> CliResult<(EmbeddingMatrix, Vec<i64>, Option<PipelineConfig>)> {
    if let Some(path) = &args.input {
        let table = Table::read(path)?;
        let ids = NodeIds::from_names(&table.ids)?;
        let labels = read_labels(&args.labels, &ids)?;
        let config = table.config()?;
        let y = EmbeddingMatrix {
            matrix: table.rows,
            kind: config.as_ref().map_or(EmbeddingKind::Structural, |c| c.embedding.kind()),
            provenance: Vec::new(),
        };
        return Ok((y, labels, config));
    }
    let graph = args
        .graph
        .as_ref()
        .ok_or_else(|| Failure::usage("node tasks need --graph or --input"))?;
    let loaded = load_edge_list(graph, args.weighted)?;
    let labels = read_labels(&args.labels, &loaded.ids)?;
    let (cfg, y) = embed_nodes(&loaded.graph, &args.config.resolve()?)?;
    Ok((y, labels, Some(cfg)))
}

fn graph_inputs(args: &EvalArgs) -> CliResult<(Vec<GraphFeatureVector>, Vec<i64>, Option<PipelineConfig>)> {
    let to_vectors = |table: &proxemb::DenseMatrix| -> Vec<GraphFeatureVector> {
        table
            .row_iter()
            .map(|r| GraphFeatureVector {
                values: r.iter().copied().collect(),
                n: 0,
                config: None,
            })
            .collect()
    };
    if let Some(path) = &args.input {
        let table = Table::read(path)?;
        let ids = NodeIds::from_names(&table.ids)?;
        let labels = read_labels(&args.labels, &ids)?;
        return Ok((to_vectors(&table.rows), labels, table.config()?));
    }
    let dir = args
        .dataset
        .as_ref()
        .ok_or_else(|| Failure::usage("graph-classify needs --dataset or --input"))?;
    let ds = load_dataset(dir, args.weighted)?;
    let labels = match (&args.labels, ds.labels) {
        (Some(_), _) => read_labels(&args.labels, &NodeIds::from_names(&ds.ids)?)?,
        (None, Some(l)) => l,
        (None, None) => return Err(Failure::usage("dataset has no labels.txt; pass --labels")),
    };
    let cfg = args.config.resolve()?;
    let opts = GraphEmbedOptions {
        weighted: args.weighted,
        baselines: false,
        retgk_max_k: 0,
    };
    let (matrix, _) = graph_features(&ds.graphs, &cfg, &opts)?;
    Ok((to_vectors(&matrix), labels, Some(cfg)))
}

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let (report, config): (EvalReport, Option<PipelineConfig>) = match args.task {
        TaskArg::NodeClassify => {
            let (y, labels, cfg) = node_inputs(args)?;
            (classify_nodes(&y, &labels, args.train_fraction, args.eval_seed)?, cfg)
        }
        TaskArg::NodeCluster => {
            let (y, labels, cfg) = node_inputs(args)?;
            let k = args.k.unwrap_or_else(|| distinct(&labels));
            (cluster_nodes(&y, k, &labels)?, cfg)
        }
        TaskArg::GraphClassify => {
            let (features, labels, cfg) = graph_inputs(args)?;
            let report = classify_graphs(&features, &labels, args.folds, args.trials, args.eval_seed)?;
            (report, cfg)
        }
    };
    let report = match config {
        Some(c) => report.with_config(c),
        None => report,
    };
    print!("{}", report.to_table());
    if let Some(path) = &args.json {
        use std::io::Write;
        let mut out = create(path)?;
        writeln!(out, "{}", report.to_json()).map_err(|e| Failure::io(path, e))?;
        out.flush().map_err(|e| Failure::io(path, e))?;
    }
    Ok(())
}
