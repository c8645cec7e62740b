//! Downstream evaluation of embeddings and graph features, and row-statistic
//! diagnostics of proximity matrices.

mod cluster;
mod logistic;
mod report;
mod split;
mod stats;
mod svm;
mod sweep;

pub use cluster::{cluster_nodes, completeness, homogeneity, silhouette, single_linkage};
pub use logistic::{classify_nodes, classify_with_split, micro_f1};
pub use report::{EvalReport, Task};
pub use split::{stratified_folds, stratified_split, stream_rng};
pub use stats::{histogram, row_stats, write_histogram_csv, HistogramBin, RowStats};
pub use svm::{classify_graphs, SVM_C_GRID};
pub use sweep::{drilldown, rank_rows, DrilldownRow, RankedRow, SweepRow};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::DenseMatrix;

/// Maps arbitrary integer labels to `0..k` in sorted label order.
pub(crate) fn encode_labels(labels: &[i64]) -> (Vec<usize>, Vec<i64>) {
    let classes: Vec<i64> = {
        let mut c = labels.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    let index: BTreeMap<i64, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    (labels.iter().map(|l| index[l]).collect(), classes)
}

/// Column means and inverse standard deviations fitted on the rows in `fit`.
/// Constant columns keep unit scale.
pub(crate) struct Standardizer {
    mean: Vec<f64>,
    inv_std: Vec<f64>,
}

impl Standardizer {
    pub(crate) fn fit(x: &DenseMatrix, fit: &[usize]) -> Self {
        let m = fit.len() as f64;
        let (mean, inv_std) = (0..x.ncols())
            .map(|j| {
                let mean = fit.iter().map(|&i| x[(i, j)]).sum::<f64>() / m;
                let var = fit.iter().map(|&i| (x[(i, j)] - mean).powi(2)).sum::<f64>() / m;
                let std = var.sqrt();
                (mean, if std > 1e-12 { 1.0 / std } else { 1.0 })
            })
            .unzip();
        Standardizer { mean, inv_std }
    }

    /// Standardized rows of `x` selected by `rows`, with a trailing bias
    /// column of ones.
    pub(crate) fn design(&self, x: &DenseMatrix, rows: &[usize]) -> DenseMatrix {
        let d = x.ncols();
        DenseMatrix::from_fn(rows.len(), d + 1, |r, j| {
            if j == d {
                1.0
            } else {
                (x[(rows[r], j)] - self.mean[j]) * self.inv_std[j]
            }
        })
    }
}

pub(crate) fn check_labels(n: usize, labels: &[i64]) -> Result<()> {
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {n} rows",
            labels.len()
        )));
    }
    Ok(())
}

/// Index of the largest score; ties go to the lower index.
pub(crate) fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, s) in scores.enumerate() {
        if s > best.1 {
            best = (i, s);
        }
    }
    best.0
}
