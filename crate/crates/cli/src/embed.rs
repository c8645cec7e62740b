use std::path::Path;

use proxemb::config::DEFAULT_HK_SCALES;
use proxemb::features::{embed_graph_set, netlsd_features, retgk_features};
use proxemb::graph::load_edge_list;
use proxemb::{run_pipeline, DenseMatrix, EmbeddingMatrix, EmbeddingMethod, Graph, PipelineConfig};

use crate::failure::{CliResult, Failure};
use crate::io::{load_dataset, provenance, Table};

/// SVD cannot produce more columns than nodes; lower the width with a
/// warning instead of failing.
pub fn clamp_dim(cfg: &mut PipelineConfig, n: usize) {
    if cfg.embedding == EmbeddingMethod::Svd && cfg.dim > n {
        log::warn!("svd dimension {} exceeds node count {n}; using {n}", cfg.dim);
        cfg.dim = n;
    }
}

pub fn embed_nodes(g: &Graph, cfg: &PipelineConfig) -> CliResult<(PipelineConfig, EmbeddingMatrix)> {
    let mut cfg = cfg.clone();
    clamp_dim(&mut cfg, g.node_count());
    let y = run_pipeline(g, &cfg)?;
    Ok((cfg, y))
}

fn columns(prefix: &str, count: usize, first: usize) -> impl Iterator<Item = String> + '_ {
    (first..first + count).map(move |i| format!("{prefix}{i}"))
}

pub fn node_embed(graph: &Path, weighted: bool, cfg: &PipelineConfig, out: &Path) -> CliResult<()> {
    let loaded = load_edge_list(graph, weighted)?;
    let requested = cfg.dim;
    let (cfg, y) = embed_nodes(&loaded.graph, cfg)?;
    let mut extra = vec![
        ("kind", format!("{:?}", y.kind).to_lowercase()),
        ("rows", y.node_count().to_string()),
    ];
    if cfg.dim != requested {
        extra.push(("clamped_from", requested.to_string()));
    }
    let table = Table {
        meta: provenance(&cfg, &extra),
        columns: std::iter::once("node".to_owned()).chain(columns("y", y.dim(), 0)).collect(),
        ids: loaded.ids.names().to_vec(),
        rows: y.matrix,
    };
    table.write(out)?;
    println!("wrote {} x {} embedding to {}", table.rows.nrows(), table.rows.ncols(), out.display());
    Ok(())
}

pub struct GraphEmbedOptions {
    pub weighted: bool,
    pub baselines: bool,
    pub retgk_max_k: usize,
}

pub fn graph_features(graphs: &[Graph], cfg: &PipelineConfig, opts: &GraphEmbedOptions) -> CliResult<(DenseMatrix, Vec<String>)> {
    let features = embed_graph_set(graphs, cfg)?;
    let mut names: Vec<String> = columns("f", cfg.total_dim(), 0).collect();
    let mut rows: Vec<Vec<f64>> = features.into_iter().map(|f| f.values).collect();
    if opts.baselines {
        names.extend(columns("netlsd_", DEFAULT_HK_SCALES.len(), 0));
        names.extend(columns("retgk_", opts.retgk_max_k, 1));
        for (row, g) in rows.iter_mut().zip(graphs) {
            row.extend(netlsd_features(g, &DEFAULT_HK_SCALES)?.values);
            row.extend(retgk_features(g, opts.retgk_max_k)?.values);
        }
    }
    let width = names.len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok((DenseMatrix::from_row_slice(graphs.len(), width, &flat), names))
}

pub fn graph_embed(dataset: &Path, cfg: &PipelineConfig, opts: &GraphEmbedOptions, out: &Path) -> CliResult<()> {
    let ds = load_dataset(dataset, opts.weighted)?;
    if ds.graphs.is_empty() {
        return Err(Failure::data(format!("{}: dataset lists no graphs", dataset.display())));
    }
    let (matrix, names) = graph_features(&ds.graphs, cfg, opts)?;
    let mut extra = vec![("graphs", ds.graphs.len().to_string())];
    if opts.baselines {
        extra.push(("baselines", format!("netlsd:{},retgk:{}", DEFAULT_HK_SCALES.len(), opts.retgk_max_k)));
    }
    let table = Table {
        meta: provenance(cfg, &extra),
        columns: std::iter::once("graph".to_owned()).chain(names).collect(),
        ids: ds.ids,
        rows: matrix,
    };
    table.write(out)?;
    println!("wrote {} x {} graph features to {}", table.rows.nrows(), table.rows.ncols(), out.display());
    Ok(())
}
