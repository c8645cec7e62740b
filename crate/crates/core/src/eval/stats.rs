use std::io::Write;

use serde::Serialize;

use crate::graph::{format_float, DenseMatrix};
use crate::nonlinearity::ZERO_TOLERANCE;

/// Per-row distribution summaries of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowStats {
    pub sums: Vec<f64>,
    /// Population variance of the entries of each row.
    pub variances: Vec<f64>,
    /// Shannon entropy (natural log) of the row after clamping negatives to
    /// zero and normalizing to sum 1.
    pub entropies: Vec<f64>,
    /// Rows whose clamped mass is numerically zero; their entropy is reported
    /// as 0 instead of being undefined.
    pub degenerate: Vec<bool>,
}

pub fn row_stats(s: &DenseMatrix) -> RowStats {
    let cols = s.ncols() as f64;
    let floor = ZERO_TOLERANCE * s.amax();
    let mut stats = RowStats {
        sums: Vec::with_capacity(s.nrows()),
        variances: Vec::with_capacity(s.nrows()),
        entropies: Vec::with_capacity(s.nrows()),
        degenerate: Vec::with_capacity(s.nrows()),
    };
    for row in s.row_iter() {
        let sum = row.sum();
        let mean = sum / cols;
        stats.sums.push(sum);
        stats
            .variances
            .push(row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / cols);

        let mass: f64 = row.iter().map(|x| x.max(0.0)).sum();
        if mass <= floor || mass == 0.0 {
            stats.entropies.push(0.0);
            stats.degenerate.push(true);
            continue;
        }
        let h: f64 = row
            .iter()
            .map(|&x| x.max(0.0) / mass)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum();
        stats.entropies.push(h.max(0.0));
        stats.degenerate.push(false);
    }
    stats
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram over `[min, max]`; the last bin is closed. A
/// constant sample gives one bin holding everything.
pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    let finite: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if finite.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return vec![HistogramBin {
            lo,
            hi,
            count: finite.len(),
        }];
    }
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lo: lo + b as f64 * width,
            hi: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for x in finite {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        out[b].count += 1;
    }
    out
}

/// `lo,hi,count` rows with a header line.
pub fn write_histogram_csv(bins: &[HistogramBin], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "lo,hi,count")?;
    for b in bins {
        writeln!(out, "{},{},{}", format_float(b.lo), format_float(b.hi), b.count)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{rw_transition, Graph};

    #[test]
    fn identity_rows() {
        let st = row_stats(&DenseMatrix::identity(3, 3));
        assert_eq!(st.sums, vec![1.0; 3]);
        for v in &st.variances {
            assert!((v - 2.0 / 9.0).abs() < 1e-15);
        }
        assert_eq!(st.entropies, vec![0.0; 3]);
    }

    #[test]
    fn constant_rows() {
        let st = row_stats(&DenseMatrix::from_element(4, 4, 0.7));
        for (v, h) in st.variances.iter().zip(&st.entropies) {
            assert!(v.abs() < 1e-15);
            assert!((h - 4f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn random_walk_on_path() {
        let st = row_stats(&rw_transition(&Graph::path(3)).unwrap());
        assert_eq!(st.sums, vec![1.0; 3]);
        assert_eq!(st.entropies[0], 0.0);
        assert!((st.entropies[1] - 2f64.ln()).abs() < 1e-15);
        assert_eq!(st.entropies[2], 0.0);
    }

    #[test]
    fn negative_and_zero_rows() {
        let s = DenseMatrix::from_row_slice(2, 2, &[-1.0, 1.0, -2.0, 0.0]);
        let st = row_stats(&s);
        assert_eq!(st.entropies[0], 0.0);
        assert!(!st.degenerate[0]);
        assert!(st.degenerate[1]);
        assert_eq!(st.sums, vec![0.0, -2.0]);
    }

    #[test]
    fn histogram_counts() {
        let h = histogram(&[0.0, 0.5, 1.0, 1.0, 2.0], 2);
        assert_eq!(h.len(), 2);
        assert_eq!(h[0].count + h[1].count, 5);
        assert_eq!(h[1].count, 3);
        assert_eq!(histogram(&[3.0, 3.0], 4)[0].count, 2);
        let mut buf = Vec::new();
        write_histogram_csv(&h, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("lo,hi,count\n0.0,1.0,2\n"));
    }
}
