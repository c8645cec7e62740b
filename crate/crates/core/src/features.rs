//! Whole-graph feature vectors by mean-pooling node embeddings.
//!
//! [`netlsd_features`] and [`retgk_features`] compute the normalized heat
//! trace and mean return probabilities directly from a spectrum. They agree
//! with mean-pooled diagonal embeddings of the heat kernel and of random-walk
//! powers, which is how the two feature maps fit the same pipeline.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::config::PipelineConfig;
use crate::embedding::{run_pipeline, EmbeddingMatrix, EmbeddingMethod};
use crate::error::{Error, Result};
use crate::graph::{adjacency, laplacian, symmetric_eig, Graph};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFeatureVector {
    pub values: Vec<f64>,
    /// Node count of the source graph.
    pub n: usize,
    pub config: Option<PipelineConfig>,
}

impl GraphFeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Column means of `Y`.
pub fn aggregate_mean(y: &EmbeddingMatrix) -> Result<GraphFeatureVector> {
    let n = y.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot pool an empty graph".into()));
    }
    let values = y
        .matrix
        .column_iter()
        .map(|c| c.sum() / n as f64)
        .collect();
    Ok(GraphFeatureVector {
        values,
        n,
        config: None,
    })
}

/// Heat traces normalized by the empty graph: `(1/n) sum_i exp(-s lambda_i)`
/// over the Laplacian spectrum, one entry per scale.
pub fn netlsd_features(g: &Graph, scales: &[f64]) -> Result<GraphFeatureVector> {
    if scales.is_empty() {
        return Err(Error::InvalidParameter("no scales given".into()));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot describe an empty graph".into()));
    }
    let (values, _) = symmetric_eig(&laplacian(g))?;
    let features = scales
        .iter()
        .map(|&s| values.iter().map(|l| (-s * l).exp()).sum::<f64>() / n as f64)
        .collect();
    Ok(GraphFeatureVector {
        values: features,
        n,
        config: Some(PipelineConfig::netlsd(scales)),
    })
}

/// Mean return probability `(1/n) sum_i (R^j)_ii` for `j = 1..=max_k`.
///
/// `R^j` is similar to `N^j` with `N = D^-1/2 A D^-1/2`, so the mean diagonal
/// is `(1/n) sum mu^j` over the eigenvalues `mu` of `N`.
pub fn retgk_features(g: &Graph, max_k: usize) -> Result<GraphFeatureVector> {
    if max_k == 0 {
        return Err(Error::InvalidParameter("max_k must be >= 1".into()));
    }
    g.check_no_isolated()?;
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
    let a = adjacency(g);
    let normalized = DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * a[(i, j)] * inv_sqrt[j]);
    let (mu, _) = symmetric_eig(&normalized)?;
    let features = (1..=max_k as i32)
        .map(|j| mu.iter().map(|m| m.powi(j)).sum::<f64>() / n as f64)
        .collect();
    Ok(GraphFeatureVector {
        values: features,
        n,
        config: Some(PipelineConfig::retgk(max_k)),
    })
}

/// Mean-pooled pipeline features for each graph, in input order.
pub fn embed_graph_set(graphs: &[Graph], cfg: &PipelineConfig) -> Result<Vec<GraphFeatureVector>> {
    if cfg.embedding == EmbeddingMethod::Svd {
        return Err(Error::Config(
            "SVD embeddings are positional and not comparable across graphs; use cfs or diag".into(),
        ));
    }
    cfg.validate()?;
    graphs
        .par_iter()
        .map(|g| {
            let y = run_pipeline(g, cfg)?;
            let mut f = aggregate_mean(&y)?;
            f.config = Some(cfg.clone());
            Ok(f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{diag_embed, EmbeddingKind};
    use crate::nonlinearity::{FilteredMatrix, Nonlinearity};
    use crate::proximity::{Operator, Proximity};
    use approx::assert_relative_eq;

    fn embedding(rows: &[&[f64]]) -> EmbeddingMatrix {
        let matrix = DMatrix::from_row_iterator(
            rows.len(),
            rows[0].len(),
            rows.iter().flat_map(|r| r.iter().copied()),
        );
        EmbeddingMatrix {
            matrix,
            kind: EmbeddingKind::Structural,
            provenance: Vec::new(),
        }
    }

    #[test]
    fn mean_pooling_examples() {
        let f = aggregate_mean(&embedding(&[&[1.5, -2.0, 3.0]])).unwrap();
        assert_eq!(f.values, vec![1.5, -2.0, 3.0]);

        let f = aggregate_mean(&embedding(&[&[1.0, -4.0], &[-1.0, 4.0]])).unwrap();
        assert_eq!(f.values, vec![0.0, 0.0]);

        let y = diag_embed(&FilteredMatrix::unfiltered(DMatrix::identity(5, 5), Proximity::LapPinv));
        assert_eq!(aggregate_mean(&y).unwrap().values, vec![1.0]);
    }

    #[test]
    fn netlsd_examples() {
        let f = netlsd_features(&Graph::empty(4), &[0.1, 1.0, 10.0]).unwrap();
        assert!(f.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));

        let f = netlsd_features(&Graph::complete(3), &[1.0]).unwrap();
        assert_relative_eq!(f.values[0], (1.0 + 2.0 * (-3.0f64).exp()) / 3.0, epsilon = 1e-12);

        let f = netlsd_features(&Graph::cycle(7), &[0.0]).unwrap();
        assert_relative_eq!(f.values[0], 1.0, epsilon = 1e-15);
        assert!(netlsd_features(&Graph::cycle(7), &[]).is_err());
    }

    #[test]
    fn retgk_examples() {
        // Bipartite graphs never return in one step.
        let f = retgk_features(&Graph::cycle(6), 3).unwrap();
        assert!(f.values[0].abs() < 1e-12);
        assert!(f.values[2].abs() < 1e-12);

        let f = retgk_features(&Graph::path(3), 2).unwrap();
        assert_relative_eq!(f.values[1], 2.0 / 3.0, epsilon = 1e-12);

        let f = retgk_features(&Graph::complete(3), 2).unwrap();
        assert_relative_eq!(f.values[1], 0.5, epsilon = 1e-12);

        assert!(matches!(
            retgk_features(&Graph::new(3, &[(0, 1)]).unwrap(), 2),
            Err(Error::IsolatedNode { node: 2 })
        ));
    }

    #[test]
    fn graph_set_examples() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let h = g.permuted(&[4, 2, 0, 3, 1]).unwrap();
        let cfg = PipelineConfig::graph_classification(Operator::HeatKernel, Nonlinearity::Identity);
        let f = embed_graph_set(&[g, h], &cfg).unwrap();
        assert_eq!(f[0].len(), 50);
        for (a, b) in f[0].values.iter().zip(&f[1].values) {
            assert!((a - b).abs() <= 1e-8);
        }

        let cfg = PipelineConfig::retgk(2);
        let f = embed_graph_set(&[Graph::complete(3), Graph::path(3)], &cfg).unwrap();
        assert_relative_eq!(f[0].values[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(f[0].values[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(f[1].values[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(f[1].values[1], 2.0 / 3.0, epsilon = 1e-12);

        assert!(embed_graph_set(&[Graph::complete(3)], &PipelineConfig::netmf()).is_err());
    }
}
