//! One-vs-rest L2-regularized logistic regression for node classification.

use nalgebra::DVector;
use rayon::prelude::*;

use super::report::{EvalReport, Task};
use super::split::{stratified_split, stream_rng};
use super::{argmax, check_labels, encode_labels, Standardizer};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::DenseMatrix;

const L2_WEIGHT: f64 = 1e-4;
const MAX_ITERATIONS: usize = 500;
const GRADIENT_TOLERANCE: f64 = 1e-6;

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Largest eigenvalue of `X^T X` by power iteration.
fn gram_spectral_norm(x: &DenseMatrix) -> f64 {
    let mut v = DVector::from_element(x.ncols(), 1.0 / (x.ncols() as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..100 {
        let w = x.tr_mul(&(x * &v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let converged = (norm - lambda).abs() <= 1e-9 * norm;
        lambda = norm;
        v = w / norm;
        if converged {
            break;
        }
    }
    lambda
}

/// Binary logistic fit by full-batch gradient descent with step `1/L`.
/// The last column of `x` is the unregularized bias.
fn fit_binary(x: &DenseMatrix, y: &[f64], step: f64) -> DVector<f64> {
    let m = x.nrows() as f64;
    let bias = x.ncols() - 1;
    let y = DVector::from_column_slice(y);
    let mut w = DVector::zeros(x.ncols());
    for _ in 0..MAX_ITERATIONS {
        let residual = (x * &w).map(sigmoid) - &y;
        let mut grad = x.tr_mul(&residual) / m;
        for j in 0..bias {
            grad[j] += L2_WEIGHT * w[j];
        }
        if grad.norm() < GRADIENT_TOLERANCE {
            break;
        }
        w.axpy(-step, &grad, 1.0);
    }
    w
}

/// Micro-averaged F1 over all classes. For single-label predictions this
/// equals accuracy.
pub fn micro_f1(truth: &[usize], predicted: &[usize]) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    if truth.is_empty() {
        return 0.0;
    }
    // Pooled over classes, every miss is one false positive and one false
    // negative.
    let tp = truth.iter().zip(predicted).filter(|(a, b)| a == b).count() as f64;
    let wrong = truth.len() as f64 - tp;
    2.0 * tp / (2.0 * tp + 2.0 * wrong)
}

/// Trains on `train` rows and reports micro-F1 on `test` rows.
pub fn classify_with_split(
    x: &DenseMatrix,
    labels: &[i64],
    train: &[usize],
    test: &[usize],
) -> Result<f64> {
    check_labels(x.nrows(), labels)?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::InvalidParameter("empty train or test split".into()));
    }
    let (classes, names) = encode_labels(labels);
    if names.len() < 2 {
        return Err(Error::InvalidParameter("labels contain a single class".into()));
    }
    let scaler = Standardizer::fit(x, train);
    let xtr = scaler.design(x, train);
    let xte = scaler.design(x, test);
    let lipschitz = gram_spectral_norm(&xtr) / (4.0 * train.len() as f64) + L2_WEIGHT;
    let step = 1.0 / (1.01 * lipschitz);

    let weights: Vec<DVector<f64>> = (0..names.len())
        .into_par_iter()
        .map(|c| {
            let y: Vec<f64> = train.iter().map(|&i| f64::from(classes[i] == c)).collect();
            fit_binary(&xtr, &y, step)
        })
        .collect();

    let scores: Vec<DVector<f64>> = weights.iter().map(|w| &xte * w).collect();
    let predicted: Vec<usize> = (0..test.len())
        .map(|r| argmax(scores.iter().map(|s| s[r])))
        .collect();
    let truth: Vec<usize> = test.iter().map(|&i| classes[i]).collect();
    Ok(micro_f1(&truth, &predicted))
}

/// Stratified random split with `train_fraction` of each class for training,
/// one-vs-rest logistic regression, micro-F1 on the held-out rows.
pub fn classify_nodes(
    y: &EmbeddingMatrix,
    labels: &[i64],
    train_fraction: f64,
    seed: u64,
) -> Result<EvalReport> {
    check_labels(y.node_count(), labels)?;
    let (classes, names) = encode_labels(labels);
    if names.len() < 2 {
        return Err(Error::InvalidParameter("labels contain a single class".into()));
    }
    let (train, test) = stratified_split(&classes, train_fraction, &mut stream_rng(seed, 0, 0))?;
    let f1 = classify_with_split(&y.matrix, labels, &train, &test)?;
    Ok(EvalReport::new(Task::NodeClassify, &[("micro_f1", f1)], seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingKind;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;

    fn wrap(matrix: DenseMatrix) -> EmbeddingMatrix {
        EmbeddingMatrix {
            matrix,
            kind: EmbeddingKind::Positional,
            provenance: Vec::new(),
        }
    }

    fn blobs(n_per: usize, gap: f64, rng: &mut ChaCha8Rng) -> (DenseMatrix, Vec<i64>) {
        let n = 2 * n_per;
        let labels: Vec<i64> = (0..n).map(|i| (i / n_per) as i64).collect();
        let x = DenseMatrix::from_fn(n, 4, |i, _| {
            gap * labels[i] as f64 + rng.random_range(-1.0..1.0)
        });
        (x, labels)
    }

    #[test]
    fn separable_blobs() {
        let (x, labels) = blobs(60, 10.0, &mut ChaCha8Rng::seed_from_u64(0));
        let r = classify_nodes(&wrap(x), &labels, 0.8, 3).unwrap();
        assert!(r.metric("micro_f1").unwrap() >= 0.99);
    }

    #[test]
    fn random_labels_are_at_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let total: f64 = (0..20)
            .map(|seed| {
                let x = DenseMatrix::from_fn(200, 8, |_, _| rng.random_range(-1.0..1.0));
                let labels: Vec<i64> = (0..200).map(|i| i % 2).collect();
                classify_nodes(&wrap(x), &labels, 0.8, seed).unwrap().metric("micro_f1").unwrap()
            })
            .sum();
        assert!((total / 20.0 - 0.5).abs() <= 0.1);
    }

    #[test]
    fn duplicated_dataset_gives_same_f1() {
        let (x, labels) = blobs(40, 1.5, &mut ChaCha8Rng::seed_from_u64(4));
        let n = x.nrows();
        let classes = encode_labels(&labels).0;
        let (train, test) = stratified_split(&classes, 0.8, &mut stream_rng(9, 0, 0)).unwrap();
        let f1 = classify_with_split(&x, &labels, &train, &test).unwrap();

        let xx = DenseMatrix::from_fn(2 * n, x.ncols(), |i, j| x[(i % n, j)]);
        let ll: Vec<i64> = (0..2 * n).map(|i| labels[i % n]).collect();
        let double = |idx: &[usize]| -> Vec<usize> {
            let mut v: Vec<usize> = idx.iter().flat_map(|&i| [i, i + n]).collect();
            v.sort_unstable();
            v
        };
        let f1_dup = classify_with_split(&xx, &ll, &double(&train), &double(&test)).unwrap();
        assert_eq!(f1, f1_dup);
    }

    #[test]
    fn deterministic_and_rejects_single_class() {
        let (x, labels) = blobs(30, 2.0, &mut ChaCha8Rng::seed_from_u64(5));
        let y = wrap(x);
        let a = classify_nodes(&y, &labels, 0.7, 1).unwrap();
        let b = classify_nodes(&y, &labels, 0.7, 1).unwrap();
        assert_eq!(a, b);
        assert!(classify_nodes(&y, &vec![3; 60], 0.8, 0).is_err());
        assert!(classify_nodes(&y, &labels, 1.0, 0).is_err());
    }

    #[test]
    fn micro_f1_examples() {
        assert_eq!(micro_f1(&[0, 1, 2], &[0, 1, 2]), 1.0);
        assert_eq!(micro_f1(&[0, 1, 1, 0], &[0, 0, 1, 1]), 0.5);
    }
}
