//! Row-distribution diagnostics for every (operator, filter) pair.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use proxemb::eval::{histogram, row_stats, write_histogram_csv, RowStats};
use proxemb::graph::{format_float, load_edge_list};
use proxemb::{EmbeddingKind, Graph, Nonlinearity, Operator, ProximitySpec};
use rayon::prelude::*;

use crate::failure::{CliResult, Failure};
use crate::io::create;
use crate::options::{parse_nonlinearity, parse_operator};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Positional,
    Structural,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub weighted: bool,
    /// Comma-separated operators; all seven by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_operator)]
    pub ops: Vec<Operator>,
    /// Comma-separated filters; the five grid filters by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_nonlinearity)]
    pub filters: Vec<Nonlinearity>,
    /// Which operator defaults to use.
    #[arg(long, value_enum, default_value = "structural")]
    pub kind: KindArg,
    /// Histogram bins for the row sums.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// `bin:5` becomes `bin5` so it is safe in a file name.
fn file_stem(op: Operator, nl: Nonlinearity) -> String {
    let filter: String = nl.to_string().chars().filter(|c| c.is_ascii_alphanumeric() || *c == '.').collect();
    format!("{}_{filter}", op.name())
}

fn compute(g: &Graph, op: Operator, nl: Nonlinearity, kind: EmbeddingKind) -> CliResult<RowStats> {
    let proximity = ProximitySpec::default_for(op, kind).resolve(g, None)?;
    let s = proximity.compute(g)?;
    Ok(row_stats(&nl.apply(&s)?.matrix))
}

fn write_rows(path: &Path, ids: &[String], stats: &RowStats) -> CliResult<()> {
    let mut out = create(path)?;
    let io = |e| Failure::io(path, e);
    writeln!(out, "node,sum,variance,entropy,degenerate").map_err(io)?;
    for (i, id) in ids.iter().enumerate() {
        writeln!(
            out,
            "{id},{},{},{},{}",
            format_float(stats.sums[i]),
            format_float(stats.variances[i]),
            format_float(stats.entropies[i]),
            stats.degenerate[i]
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

fn spread(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub fn run(args: &DiagnoseArgs) -> CliResult<()> {
    if args.bins == 0 {
        return Err(Failure::usage("--bins must be at least 1"));
    }
    let loaded = load_edge_list(&args.graph, args.weighted)?;
    let ops = if args.ops.is_empty() { Operator::ALL.to_vec() } else { args.ops.clone() };
    let filters = if args.filters.is_empty() {
        Nonlinearity::GRID.to_vec()
    } else {
        args.filters.clone()
    };
    let kind = match args.kind {
        KindArg::Positional => EmbeddingKind::Positional,
        KindArg::Structural => EmbeddingKind::Structural,
    };
    let pairs: Vec<(Operator, Nonlinearity)> = ops
        .iter()
        .flat_map(|&op| filters.iter().map(move |&nl| (op, nl)))
        .collect();
    let results: Vec<CliResult<RowStats>> = pairs
        .par_iter()
        .map(|&(op, nl)| compute(&loaded.graph, op, nl, kind))
        .collect();

    println!(
        "{:<22} {:>12} {:>12} {:>10} {:>10} {:>10}",
        "combination", "min_sum", "max_sum", "min_ent", "max_ent", "degenerate"
    );
    for (&(op, nl), stats) in pairs.iter().zip(results) {
        let stats = stats.map_err(|f| Failure {
            code: f.code,
            message: format!("{} / {nl}: {}", op.name(), f.message),
        })?;
        let stem = file_stem(op, nl);
        write_rows(&args.out_dir.join(format!("{stem}_rows.csv")), loaded.ids.names(), &stats)?;
        let hist_path = args.out_dir.join(format!("{stem}_hist.csv"));
        let mut out = create(&hist_path)?;
        write_histogram_csv(&histogram(&stats.sums, args.bins), &mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Failure::io(&hist_path, e))?;

        let (s_lo, s_hi) = spread(&stats.sums);
        let (e_lo, e_hi) = spread(&stats.entropies);
        println!(
            "{:<22} {s_lo:>12.4e} {s_hi:>12.4e} {e_lo:>10.4} {e_hi:>10.4} {:>10}",
            format!("{} {nl}", op.name()),
            stats.degenerate.iter().filter(|&&d| d).count()
        );
    }
    println!("wrote {} combinations to {}", pairs.len(), args.out_dir.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_stems_drop_colons() {
        assert_eq!(file_stem(Operator::Ppmi, Nonlinearity::Bin(5.0)), "ppmi_bin5");
        assert_eq!(file_stem(Operator::LapPinv, Nonlinearity::Log), "lap_pinv_log");
        assert_eq!(file_stem(Operator::HeatKernel, Nonlinearity::Bin(2.5)), "hk_bin2.5");
    }
}
