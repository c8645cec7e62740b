//! Elementwise filters applied to a proximity matrix before embedding.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DenseMatrix;
use crate::proximity::{Operator, Proximity, ProximityMatrix};

/// Entries within `ZERO_TOLERANCE * max|S|` of zero (or of the binarization
/// threshold) are treated as equal to it. Proximities that vanish in exact
/// arithmetic come out of eigensolvers as `~1e-17` noise; without this the
/// log and binarization filters would amplify that noise into real values.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Filter selected by the user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Nonlinearity {
    Identity,
    /// `log(max(S, 1))` for PPMI, [`log_general`] for every other operator.
    Log,
    /// Binarize at the `p`-th percentile.
    Bin(f64),
}

impl Nonlinearity {
    /// The five filters of the standard design grid.
    pub const GRID: [Nonlinearity; 5] = [
        Nonlinearity::Identity,
        Nonlinearity::Log,
        Nonlinearity::Bin(5.0),
        Nonlinearity::Bin(50.0),
        Nonlinearity::Bin(95.0),
    ];

    /// Parses `identity`, `log`, or `bin:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Nonlinearity::Identity),
            "log" => Ok(Nonlinearity::Log),
            _ => {
                let p = s
                    .strip_prefix("bin:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown nonlinearity {s:?}")))?;
                check_percentile(p)?;
                Ok(Nonlinearity::Bin(p))
            }
        }
    }

    pub fn apply(&self, s: &ProximityMatrix) -> Result<FilteredMatrix> {
        let filter = match *self {
            Nonlinearity::Identity => Filter::Identity,
            Nonlinearity::Log if s.operator() == Operator::Ppmi => Filter::LogPpmi,
            Nonlinearity::Log => Filter::LogGeneral,
            Nonlinearity::Bin(p) => Filter::BinPercentile(p),
        };
        filter.apply(s)
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Identity => f.write_str("identity"),
            Nonlinearity::Log => f.write_str("log"),
            Nonlinearity::Bin(p) => write!(f, "bin:{p}"),
        }
    }
}

/// The concrete filter that produced a [`FilteredMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Filter {
    Identity,
    LogPpmi,
    LogGeneral,
    BinPercentile(f64),
}

impl Filter {
    pub fn apply(&self, s: &ProximityMatrix) -> Result<FilteredMatrix> {
        let matrix = self.apply_matrix(&s.matrix)?;
        Ok(FilteredMatrix {
            matrix,
            filter: *self,
            source: s.params,
        })
    }

    pub fn apply_matrix(&self, s: &DenseMatrix) -> Result<DenseMatrix> {
        match *self {
            Filter::Identity => Ok(identity(s)),
            Filter::LogPpmi => Ok(log_ppmi(s)),
            Filter::LogGeneral => log_general(s),
            Filter::BinPercentile(p) => binarize_percentile(s, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredMatrix {
    pub matrix: DenseMatrix,
    pub filter: Filter,
    pub source: Proximity,
}

impl FilteredMatrix {
    /// Wraps a raw matrix as the identity-filtered output of `source`.
    pub fn unfiltered(matrix: DenseMatrix, source: Proximity) -> Self {
        FilteredMatrix {
            matrix,
            filter: Filter::Identity,
            source,
        }
    }
}

pub fn identity(s: &DenseMatrix) -> DenseMatrix {
    s.clone()
}

/// `log(max(S_ij, 1))`.
pub fn log_ppmi(s: &DenseMatrix) -> DenseMatrix {
    s.map(|x| x.max(1.0).ln())
}

fn zero_band(s: &DenseMatrix) -> f64 {
    ZERO_TOLERANCE * s.amax()
}

/// `0` where `S_ij <= 0`, otherwise `log(S_ij / min(S+))` with `min(S+)` the
/// smallest positive entry.
pub fn log_general(s: &DenseMatrix) -> Result<DenseMatrix> {
    let band = zero_band(s);
    let min_pos = s
        .iter()
        .copied()
        .filter(|&x| x > band)
        .fold(f64::INFINITY, f64::min);
    if !min_pos.is_finite() {
        return Err(Error::NoPositiveEntry);
    }
    Ok(s.map(|x| if x > band { (x / min_pos).ln() } else { 0.0 }))
}

fn check_percentile(p: f64) -> Result<()> {
    if (0.0..100.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "percentile must lie in [0, 100), got {p}"
        )))
    }
}

/// Nearest-rank `p`-th percentile of all entries: the `ceil(p N / 100)`-th
/// smallest (at least the first).
pub fn percentile_threshold(s: &DenseMatrix, p: f64) -> Result<f64> {
    check_percentile(p)?;
    let mut values: Vec<f64> = s.iter().copied().collect();
    if values.is_empty() {
        return Err(Error::InvalidParameter("percentile of an empty matrix".into()));
    }
    let rank = ((p * values.len() as f64 / 100.0).ceil() as usize).max(1);
    let (_, nth, _) = values.select_nth_unstable_by(rank - 1, f64::total_cmp);
    Ok(*nth)
}

/// `0` where `S_ij <= a`, `1` where `S_ij > a`, with `a` the `p`-th percentile.
pub fn binarize_percentile(s: &DenseMatrix, p: f64) -> Result<DenseMatrix> {
    let threshold = percentile_threshold(s, p)?;
    let cut = threshold + zero_band(s);
    Ok(s.map(|x| if x > cut { 1.0 } else { 0.0 }))
}
