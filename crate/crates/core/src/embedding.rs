//! Embedding functions and the proximity -> filter -> embedding pipeline.
//!
//! Truncated SVD gives positional embeddings: automorphic nodes in different
//! components land on different rows. Characteristic function sampling (CFS)
//! only sees the multiset of a node's proximity scores, so automorphic nodes
//! get identical rows and the result is structural. The diagonal embedding is
//! the one-dimensional special case used by heat-trace and return-probability
//! graph features.

use std::fmt;

use nalgebra::{DMatrix, SVD};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::graph::{DenseMatrix, Graph};
use crate::nonlinearity::{Filter, FilteredMatrix};
use crate::proximity::{Proximity, ProximityMatrix};

/// Upper end of the CFS landmark range.
pub const CFS_T_MAX: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmbeddingMethod {
    Svd,
    Cfs,
    Diag,
}

impl EmbeddingMethod {
    pub fn name(self) -> &'static str {
        match self {
            EmbeddingMethod::Svd => "svd",
            EmbeddingMethod::Cfs => "cfs",
            EmbeddingMethod::Diag => "diag",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "svd" => Some(EmbeddingMethod::Svd),
            "cfs" => Some(EmbeddingMethod::Cfs),
            "diag" => Some(EmbeddingMethod::Diag),
            _ => None,
        }
    }

    pub fn kind(self) -> EmbeddingKind {
        match self {
            EmbeddingMethod::Svd => EmbeddingKind::Positional,
            EmbeddingMethod::Cfs => EmbeddingKind::Structural,
            EmbeddingMethod::Diag => EmbeddingKind::Diagonal,
        }
    }
}

impl fmt::Display for EmbeddingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EmbeddingKind {
    Positional,
    Structural,
    Diagonal,
}

/// Where one block of columns came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockProvenance {
    pub proximity: Proximity,
    pub filter: Filter,
    pub method: EmbeddingMethod,
    pub scale: Option<f64>,
    pub width: usize,
}

/// `n x d` node feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub matrix: DenseMatrix,
    pub kind: EmbeddingKind,
    pub provenance: Vec<BlockProvenance>,
}

impl EmbeddingMatrix {
    pub fn node_count(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn single(s: &FilteredMatrix, matrix: DenseMatrix, method: EmbeddingMethod) -> Self {
        let width = matrix.ncols();
        EmbeddingMatrix {
            matrix,
            kind: method.kind(),
            provenance: vec![BlockProvenance {
                proximity: s.source,
                filter: s.filter,
                method,
                scale: None,
                width,
            }],
        }
    }
}

impl From<ProximityMatrix> for FilteredMatrix {
    fn from(s: ProximityMatrix) -> Self {
        FilteredMatrix::unfiltered(s.matrix, s.params)
    }
}

/// Rank-`d` SVD embedding `U_d Σ_d^{1/2}`. Columns follow descending singular
/// value; each left singular vector is signed so its largest-magnitude entry
/// is positive.
pub fn svd_embed(s: &FilteredMatrix, d: usize) -> Result<EmbeddingMatrix> {
    let m = &s.matrix;
    let n = m.nrows();
    if d == 0 || d > n {
        return Err(Error::InvalidParameter(format!(
            "SVD dimension must lie in 1..={n}, got {d}"
        )));
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut y = DMatrix::zeros(n, d);
    for (k, &idx) in order.iter().take(d).enumerate() {
        let mut col = u.column(idx).clone_owned();
        let pivot = col.iamax();
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        y.set_column(k, &(col * svd.singular_values[idx].sqrt()));
    }
    Ok(EmbeddingMatrix::single(s, y, EmbeddingMethod::Svd))
}

/// Landmarks `t_j = j * 100 / (d/2)` for `j = 1..=d/2`.
pub fn cfs_landmarks(d: usize) -> Vec<f64> {
    let half = d / 2;
    (1..=half)
        .map(|j| j as f64 * CFS_T_MAX / half as f64)
        .collect()
}

/// Characteristic function sampling. Row `u` interleaves the real and
/// imaginary parts of `sum_v exp(i t S_vu)` at each landmark, divided by `n`
/// when `normalize` is set.
pub fn cfs_embed(s: &FilteredMatrix, d: usize, normalize: bool) -> Result<EmbeddingMatrix> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "CFS dimension must be even and >= 2, got {d}"
        )));
    }
    let m = &s.matrix;
    let n = m.nrows();
    let landmarks = cfs_landmarks(d);
    let scale = if normalize && n > 0 { 1.0 / n as f64 } else { 1.0 };
    let rows: Vec<Vec<f64>> = (0..m.ncols())
        .into_par_iter()
        .map(|u| {
            let column = m.column(u);
            let mut row = Vec::with_capacity(d);
            for &t in &landmarks {
                let (mut re, mut im) = (0.0, 0.0);
                for &x in column.iter() {
                    let (sin, cos) = (t * x).sin_cos();
                    re += cos;
                    im += sin;
                }
                row.push(re * scale);
                row.push(im * scale);
            }
            row
        })
        .collect();
    let y = DMatrix::from_fn(m.ncols(), d, |i, j| rows[i][j]);
    Ok(EmbeddingMatrix::single(s, y, EmbeddingMethod::Cfs))
}

/// One-column embedding holding the diagonal of `S`.
pub fn diag_embed(s: &FilteredMatrix) -> EmbeddingMatrix {
    let y = DMatrix::from_column_slice(s.matrix.nrows(), 1, s.matrix.diagonal().as_slice());
    EmbeddingMatrix::single(s, y, EmbeddingMethod::Diag)
}

/// Horizontal concatenation, in order.
pub fn multiscale_concat(blocks: Vec<EmbeddingMatrix>) -> Result<EmbeddingMatrix> {
    let mut iter = blocks.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("nothing to concatenate".into()))?;
    let rest: Vec<_> = iter.collect();
    if rest.is_empty() {
        return Ok(first);
    }
    let n = first.node_count();
    for b in &rest {
        if b.node_count() != n {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate blocks with {} and {} rows",
                n,
                b.node_count()
            )));
        }
        if b.kind != first.kind {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate {:?} and {:?} embeddings",
                first.kind, b.kind
            )));
        }
    }
    let width: usize = first.dim() + rest.iter().map(|b| b.dim()).sum::<usize>();
    let mut matrix = DMatrix::zeros(n, width);
    let mut provenance = first.provenance.clone();
    let mut offset = 0;
    for b in std::iter::once(&first).chain(&rest) {
        matrix.columns_mut(offset, b.dim()).copy_from(&b.matrix);
        offset += b.dim();
    }
    for b in rest {
        provenance.extend(b.provenance);
    }
    Ok(EmbeddingMatrix {
        matrix,
        kind: first.kind,
        provenance,
    })
}

/// Runs proximity, filter, and embedding once per scale and concatenates the
/// per-scale blocks in scale order.
pub fn run_pipeline(g: &Graph, cfg: &PipelineConfig) -> Result<EmbeddingMatrix> {
    cfg.validate()?;
    match cfg.scales.as_deref() {
        None => embed_once(g, cfg, None),
        Some(scales) => {
            let blocks = scales
                .par_iter()
                .map(|&s| embed_once(g, cfg, Some(s)))
                .collect::<Result<Vec<_>>>()?;
            multiscale_concat(blocks)
        }
    }
}

fn embed_once(g: &Graph, cfg: &PipelineConfig, scale: Option<f64>) -> Result<EmbeddingMatrix> {
    let proximity = cfg.proximity.resolve(g, scale)?;
    let s = proximity.compute(g)?;
    let filtered = cfg.nonlinearity.apply(&s)?;
    let mut y = match cfg.embedding {
        EmbeddingMethod::Svd => svd_embed(&filtered, cfg.dim)?,
        EmbeddingMethod::Cfs => cfs_embed(&filtered, cfg.dim, cfg.cfs_normalize)?,
        EmbeddingMethod::Diag => diag_embed(&filtered),
    };
    for block in &mut y.provenance {
        block.scale = scale;
    }
    Ok(y)
}
