//! Design-grid sweeps. Every cell is an independent pipeline run scored on
//! one task; cells run in parallel and the table is assembled in grid order.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use proxemb::eval::{classify_graphs, classify_nodes, cluster_nodes, drilldown, rank_rows, RankedRow, SweepRow};
use proxemb::features::embed_graph_set;
use proxemb::graph::{format_float, load_edge_list, parse_labels};
use proxemb::{EmbeddingMethod, Graph, Nonlinearity, Operator, PipelineConfig};
use rayon::prelude::*;

use crate::embed::clamp_dim;
use crate::evaluate::{distinct, TaskArg};
use crate::failure::{CliResult, Failure};
use crate::io::{create, load_dataset, read_text};
use crate::options::{parse_embedding, parse_operator};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Edge list for node tasks.
    #[arg(long, conflicts_with = "dataset")]
    pub graph: Option<PathBuf>,
    /// `id label` file for node tasks.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Dataset directory for graph-classify.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub weighted: bool,
    /// Sweep multiscale orders 1..=K of one operator (adj or rw) instead of
    /// the full operator-by-filter grid.
    #[arg(long, value_name = "K")]
    pub order: Option<usize>,
    /// Operator for an order sweep.
    #[arg(long, value_parser = parse_operator, default_value = "rw")]
    pub proximity: Operator,
    /// Filter for an order sweep.
    #[arg(long, value_parser = crate::options::parse_nonlinearity, default_value = "identity")]
    pub nonlinearity: Nonlinearity,
    #[arg(long, value_parser = parse_embedding, default_value = "cfs")]
    pub embedding: EmbeddingMethod,
    /// Columns per scale; defaults to the embedding's usual width.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Scored repetitions per cell: random splits for node-classify, CV
    /// trials for graph-classify. Clustering is deterministic and uses one.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Results CSV.
    #[arg(long)]
    pub out: PathBuf,
}

struct Cell {
    proximity: String,
    nonlinearity: String,
    config: PipelineConfig,
}

fn grid_cells(args: &SweepArgs) -> CliResult<Vec<Cell>> {
    let with_dim = |cfg: PipelineConfig| match args.dim {
        Some(d) => cfg.with_dim(d),
        None => cfg,
    };
    if let Some(k) = args.order {
        if !matches!(args.proximity, Operator::AdjPower | Operator::RwPower) {
            return Err(Failure::usage("--order sweeps need --proximity adj or rw"));
        }
        if k == 0 {
            return Err(Failure::usage("--order must be at least 1"));
        }
        return Ok((1..=k)
            .map(|top| {
                let scales: Vec<f64> = (1..=top).map(|s| s as f64).collect();
                let cfg = PipelineConfig::new(args.proximity, args.nonlinearity, args.embedding);
                Cell {
                    proximity: format!("{}:1-{top}", args.proximity.name()),
                    nonlinearity: args.nonlinearity.to_string(),
                    config: with_dim(cfg).with_scales(scales),
                }
            })
            .collect());
    }
    let mut cells = Vec::new();
    for op in Operator::ALL {
        for nl in Nonlinearity::GRID {
            let cfg = if args.task == TaskArg::GraphClassify && args.dim.is_none() {
                PipelineConfig::graph_classification(op, nl)
            } else {
                with_dim(PipelineConfig::new(op, nl, args.embedding))
            };
            cells.push(Cell {
                proximity: op.name().into(),
                nonlinearity: nl.to_string(),
                config: cfg,
            });
        }
    }
    Ok(cells)
}

enum Input {
    Nodes { graph: Graph, labels: Vec<i64> },
    Graphs { graphs: Vec<Graph>, labels: Vec<i64> },
}

fn load_input(args: &SweepArgs) -> CliResult<Input> {
    match args.task {
        TaskArg::GraphClassify => {
            let dir = args
                .dataset
                .as_ref()
                .ok_or_else(|| Failure::usage("graph-classify sweeps need --dataset"))?;
            let ds = load_dataset(dir, args.weighted)?;
            let labels = ds
                .labels
                .ok_or_else(|| Failure::usage("dataset has no labels.txt"))?;
            Ok(Input::Graphs { graphs: ds.graphs, labels })
        }
        _ => {
            let path = args
                .graph
                .as_ref()
                .ok_or_else(|| Failure::usage("node sweeps need --graph"))?;
            let labels_path = args
                .labels
                .as_ref()
                .ok_or_else(|| Failure::usage("node sweeps need --labels"))?;
            let loaded = load_edge_list(path, args.weighted)?;
            let labels = parse_labels(&read_text(labels_path)?, &loaded.ids)?;
            Ok(Input::Nodes {
                graph: loaded.graph,
                labels,
            })
        }
    }
}

/// Scores of one cell, one per repetition.
fn score(args: &SweepArgs, input: &Input, cfg: &PipelineConfig) -> CliResult<Vec<f64>> {
    let trials = args.trials.max(1) as u64;
    match (input, args.task) {
        (Input::Nodes { graph, labels }, TaskArg::NodeClassify) => {
            let mut cfg = cfg.clone();
            clamp_dim(&mut cfg, graph.node_count());
            let y = proxemb::run_pipeline(graph, &cfg)?;
            (0..trials)
                .map(|t| {
                    let r = classify_nodes(&y, labels, args.train_fraction, args.seed.wrapping_add(t))?;
                    Ok(r.metric("micro_f1").unwrap_or_default())
                })
                .collect()
        }
        (Input::Nodes { graph, labels }, _) => {
            let mut cfg = cfg.clone();
            clamp_dim(&mut cfg, graph.node_count());
            let y = proxemb::run_pipeline(graph, &cfg)?;
            let r = cluster_nodes(&y, distinct(labels), labels)?;
            Ok(vec![r.metric("homogeneity").unwrap_or_default()])
        }
        (Input::Graphs { graphs, labels }, _) => {
            let features = embed_graph_set(graphs, cfg)?;
            (0..trials)
                .map(|t| {
                    let r = classify_graphs(&features, labels, args.folds, 1, args.seed.wrapping_add(t))?;
                    Ok(r.metric("accuracy_mean").unwrap_or_default())
                })
                .collect()
        }
    }
}

fn metric_name(task: TaskArg) -> &'static str {
    match task {
        TaskArg::NodeClassify => "micro_f1",
        TaskArg::NodeCluster => "homogeneity",
        TaskArg::GraphClassify => "accuracy",
    }
}

fn write_results(path: &Path, task: TaskArg, rows: &[SweepRow], ranked: &[RankedRow]) -> CliResult<()> {
    let mut out = create(path)?;
    let io = |e| Failure::io(path, e);
    writeln!(out, "# output.metric = {}", metric_name(task)).map_err(io)?;
    let reps = rows.first().map_or(0, |r| r.accuracies.len());
    let rep_cols: Vec<String> = (0..reps).map(|i| format!("score_{i}")).collect();
    writeln!(
        out,
        "proximity,nonlinearity,avg_rank,avg_accuracy,max_accuracy{}{}",
        if reps > 0 { "," } else { "" },
        rep_cols.join(",")
    )
    .map_err(io)?;
    for (row, r) in rows.iter().zip(ranked) {
        write!(
            out,
            "{},{},{},{},{}",
            r.proximity,
            r.nonlinearity,
            format_float(r.avg_rank),
            format_float(r.avg_accuracy),
            format_float(r.max_accuracy)
        )
        .map_err(io)?;
        for a in &row.accuracies {
            write!(out, ",{}", format_float(*a)).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

fn print_ranked(title: &str, rows: &[(String, f64, f64, f64)]) {
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(title.len());
    println!("{title:width$}  avg_rank  avg_acc  max_acc");
    for (name, rank, avg, max) in rows {
        println!("{name:width$}  {rank:8.2}  {avg:7.4}  {max:7.4}");
    }
    println!();
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let cells = grid_cells(args)?;
    let input = load_input(args)?;
    let results: Vec<(CliResult<Vec<f64>>, f64)> = cells
        .par_iter()
        .map(|cell| {
            let start = Instant::now();
            let scores = score(args, &input, &cell.config);
            (scores, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len());
    let mut runtimes = Vec::with_capacity(cells.len());
    for (cell, (scores, secs)) in cells.iter().zip(results) {
        let accuracies = scores.map_err(|f| {
            Failure {
                code: f.code,
                message: format!("{} / {}: {}", cell.proximity, cell.nonlinearity, f.message),
            }
        })?;
        rows.push(SweepRow {
            proximity: cell.proximity.clone(),
            nonlinearity: cell.nonlinearity.clone(),
            accuracies,
        });
        runtimes.push(secs);
    }
    let ranked = rank_rows(&rows);
    write_results(&args.out, args.task, &rows, &ranked)?;

    let table: Vec<_> = ranked
        .iter()
        .map(|r| (format!("{} {}", r.proximity, r.nonlinearity), r.avg_rank, r.avg_accuracy, r.max_accuracy))
        .collect();
    print_ranked("design", &table);
    if args.order.is_none() {
        for (title, key) in [("proximity", 0), ("nonlinearity", 1)] {
            let groups = drilldown(&ranked, |r| if key == 0 { &r.proximity } else { &r.nonlinearity });
            let groups: Vec<_> = groups
                .into_iter()
                .map(|g| (g.choice, g.avg_rank, g.avg_accuracy, g.max_accuracy))
                .collect();
            print_ranked(title, &groups);
        }
    }
    println!("runtime (s)");
    for (cell, secs) in cells.iter().zip(&runtimes) {
        println!("{} {}  {secs:.3}", cell.proximity, cell.nonlinearity);
    }
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

