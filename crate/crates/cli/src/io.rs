//! File formats used by the commands.
//!
//! Matrices are written as CSV with a leading block of `# key = value`
//! comment lines. Keys under `output.` describe the file itself; every other
//! key is part of the pipeline config that produced it, so the block
//! re-parses into the same [`PipelineConfig`].

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use proxemb::config::parse_kv;
use proxemb::graph::format_float;
use proxemb::{DenseMatrix, Graph, PipelineConfig};

use crate::failure::{CliResult, Failure};

pub const OUTPUT_PREFIX: &str = "output.";

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

pub fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(path, e))
}

/// A table with a provenance header: `# key = value` lines, one column-name
/// line, then rows whose first field is an identifier.
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub ids: Vec<String>,
    pub rows: DenseMatrix,
}

impl Table {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut out = create(path)?;
        let io = |e| Failure::io(path, e);
        for (k, v) in &self.meta {
            writeln!(out, "# {k} = {v}").map_err(io)?;
        }
        writeln!(out, "{}", self.columns.join(",")).map_err(io)?;
        for (i, id) in self.ids.iter().enumerate() {
            write!(out, "{id}").map_err(io)?;
            for x in self.rows.row(i).iter() {
                write!(out, ",{}", format_float(*x)).map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn read(path: &Path) -> CliResult<Table> {
        let text = read_text(path)?;
        let mut meta_text = String::new();
        let mut lines = text.lines().enumerate().peekable();
        while let Some((_, line)) = lines.peek() {
            match line.strip_prefix('#') {
                Some(rest) => {
                    meta_text.push_str(rest);
                    meta_text.push('\n');
                    lines.next();
                }
                None => break,
            }
        }
        let meta = parse_kv(&meta_text)?.into_iter().collect();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Failure::data(format!("{}: missing column header", path.display())))?;
        let columns: Vec<String> = header.split(',').map(str::to_owned).collect();
        let width = columns.len() - 1;
        let mut ids = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            ids.push(fields.next().unwrap_or_default().to_owned());
            let row: Vec<f64> = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::data(format!("{}:{}: {e}", path.display(), i + 1)))?;
            if row.len() != width {
                return Err(Failure::data(format!(
                    "{}:{}: expected {width} values, found {}",
                    path.display(),
                    i + 1,
                    row.len()
                )));
            }
            values.extend(row);
        }
        let rows = DenseMatrix::from_row_slice(ids.len(), width, &values);
        Ok(Table {
            meta,
            columns,
            ids,
            rows,
        })
    }

    /// The pipeline config recorded in the header, if any.
    pub fn config(&self) -> CliResult<Option<PipelineConfig>> {
        let map: BTreeMap<String, String> = self
            .meta
            .iter()
            .filter(|(k, _)| !k.starts_with(OUTPUT_PREFIX))
            .cloned()
            .collect();
        if map.is_empty() {
            return Ok(None);
        }
        Ok(Some(PipelineConfig::from_map(&map)?))
    }
}

/// `config.to_pairs()` followed by `output.*` entries.
pub fn provenance(config: &PipelineConfig, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut meta = config.to_pairs();
    meta.extend(extra.iter().map(|(k, v)| (format!("{OUTPUT_PREFIX}{k}"), v.clone())));
    meta
}

/// Edge list in `u v` form with 0-based node indices.
pub fn write_edge_list(g: &Graph, path: &Path) -> CliResult<()> {
    let mut out = create(path)?;
    for &(u, v, _) in g.edges() {
        writeln!(out, "{u} {v}").map_err(|e| Failure::io(path, e))?;
    }
    out.flush().map_err(|e| Failure::io(path, e))
}

/// `id label` lines, one per entry.
pub fn write_labels<T: std::fmt::Display>(labels: &[T], path: &Path) -> CliResult<()> {
    let mut out = create(path)?;
    writeln!(out, "node role").map_err(|e| Failure::io(path, e))?;
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "{i} {l}").map_err(|e| Failure::io(path, e))?;
    }
    out.flush().map_err(|e| Failure::io(path, e))
}

/// A graph-classification dataset: `index.txt` lists `graph_id path` (paths
/// relative to the directory) and `labels.txt` lists `graph_id label`.
pub struct Dataset {
    pub ids: Vec<String>,
    pub graphs: Vec<Graph>,
    pub labels: Option<Vec<i64>>,
}

pub fn load_dataset(dir: &Path, weighted: bool) -> CliResult<Dataset> {
    let index_path = dir.join("index.txt");
    let mut ids = Vec::new();
    let mut paths: Vec<PathBuf> = Vec::new();
    for (i, line) in read_text(&index_path)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(p), None) => {
                ids.push(id.to_owned());
                paths.push(dir.join(p));
            }
            _ => {
                return Err(Failure::data(format!(
                    "{}:{}: expected `graph_id path`",
                    index_path.display(),
                    i + 1
                )))
            }
        }
    }
    let graphs = paths
        .iter()
        .map(|p| Ok(proxemb::graph::load_edge_list(p, weighted)?.graph))
        .collect::<CliResult<Vec<_>>>()?;

    let labels_path = dir.join("labels.txt");
    let labels = if labels_path.exists() {
        let mut map = BTreeMap::new();
        for (i, line) in read_text(&labels_path)?.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(id), Some(label)) = (parts.next(), parts.next()) else {
                return Err(Failure::data(format!("{}:{}: expected `graph_id label`", labels_path.display(), i + 1)));
            };
            match label.parse::<i64>() {
                Ok(l) => {
                    map.insert(id.to_owned(), l);
                }
                Err(_) if i == 0 => continue,
                Err(_) => {
                    return Err(Failure::data(format!(
                        "{}:{}: label {label:?} is not an integer",
                        labels_path.display(),
                        i + 1
                    )))
                }
            }
        }
        let labels = ids
            .iter()
            .map(|id| {
                map.get(id)
                    .copied()
                    .ok_or_else(|| Failure::data(format!("graph {id} has no label")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Some(labels)
    } else {
        None
    };
    Ok(Dataset { ids, graphs, labels })
}
