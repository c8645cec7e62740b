//! Linear soft-margin SVM for graph classification under stratified
//! cross-validation.

use nalgebra::DVector;
use rayon::prelude::*;

use super::report::{EvalReport, Task};
use super::split::{stratified_folds, stratified_split, stream_rng};
use super::{argmax, check_labels, encode_labels, Standardizer};
use crate::error::{Error, Result};
use crate::features::GraphFeatureVector;
use crate::graph::DenseMatrix;

/// Candidate values of the soft-margin constant.
pub const SVM_C_GRID: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

const ITERATIONS: usize = 1000;
const INNER_TRAIN_FRACTION: f64 = 0.8;

/// Full-batch Pegasos: minimizes `lambda/2 |w|^2 + mean(hinge)` with step
/// `1/(lambda t)`, projection onto the ball of radius `1/sqrt(lambda)`, and
/// averaging over the second half of the iterates. `lambda = 1/(C m)`.
fn fit_hinge(x: &DenseMatrix, y: &[f64], c: f64) -> DVector<f64> {
    let m = x.nrows();
    let lambda = 1.0 / (c * m as f64);
    let radius = 1.0 / lambda.sqrt();
    let mut w = DVector::zeros(x.ncols());
    let mut avg = DVector::zeros(x.ncols());
    let mut averaged = 0.0;
    for t in 1..=ITERATIONS {
        let margins = x * &w;
        let mut pull = DVector::zeros(x.ncols());
        for i in 0..m {
            if y[i] * margins[i] < 1.0 {
                pull.axpy(y[i], &x.row(i).transpose(), 1.0);
            }
        }
        let eta = 1.0 / (lambda * t as f64);
        w *= 1.0 - eta * lambda;
        w.axpy(eta / m as f64, &pull, 1.0);
        let norm = w.norm();
        if norm > radius {
            w *= radius / norm;
        }
        if t > ITERATIONS / 2 {
            avg += &w;
            averaged += 1.0;
        }
    }
    avg / averaged
}

struct OneVsRest {
    scaler: Standardizer,
    weights: Vec<DVector<f64>>,
}

impl OneVsRest {
    fn fit(x: &DenseMatrix, classes: &[usize], k: usize, rows: &[usize], c: f64) -> Self {
        let scaler = Standardizer::fit(x, rows);
        let design = scaler.design(x, rows);
        let weights = (0..k)
            .map(|class| {
                let y: Vec<f64> = rows
                    .iter()
                    .map(|&i| if classes[i] == class { 1.0 } else { -1.0 })
                    .collect();
                fit_hinge(&design, &y, c)
            })
            .collect();
        OneVsRest { scaler, weights }
    }

    fn accuracy(&self, x: &DenseMatrix, classes: &[usize], rows: &[usize]) -> f64 {
        let design = self.scaler.design(x, rows);
        let scores: Vec<DVector<f64>> = self.weights.iter().map(|w| &design * w).collect();
        let correct = rows
            .iter()
            .enumerate()
            .filter(|&(r, &i)| argmax(scores.iter().map(|s| s[r])) == classes[i])
            .count();
        correct as f64 / rows.len() as f64
    }
}

/// Accuracy on one outer fold, with C picked on an inner stratified split of
/// the training rows. Ties go to the smaller C.
fn fold_accuracy(
    x: &DenseMatrix,
    classes: &[usize],
    k: usize,
    train: &[usize],
    test: &[usize],
    seed: u64,
    trial: usize,
    fold: usize,
) -> Result<f64> {
    let train_classes: Vec<usize> = train.iter().map(|&i| classes[i]).collect();
    // Stream 0 of each trial assigns folds; inner splits use 1..=folds.
    let (inner_fit, inner_val) =
        stratified_split(&train_classes, INNER_TRAIN_FRACTION, &mut stream_rng(seed, trial, fold + 1))?;
    let inner_fit: Vec<usize> = inner_fit.iter().map(|&r| train[r]).collect();
    let inner_val: Vec<usize> = inner_val.iter().map(|&r| train[r]).collect();
    let mut best = (SVM_C_GRID[0], f64::NEG_INFINITY);
    if !inner_val.is_empty() {
        for c in SVM_C_GRID {
            let acc = OneVsRest::fit(x, classes, k, &inner_fit, c).accuracy(x, classes, &inner_val);
            if acc > best.1 {
                best = (c, acc);
            }
        }
    }
    Ok(OneVsRest::fit(x, classes, k, train, best.0).accuracy(x, classes, test))
}

/// Mean and standard deviation (over trials) of stratified `folds`-fold
/// cross-validated accuracy. Each trial reshuffles the folds.
pub fn classify_graphs(
    features: &[GraphFeatureVector],
    labels: &[i64],
    folds: usize,
    trials: usize,
    seed: u64,
) -> Result<EvalReport> {
    check_labels(features.len(), labels)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let dim = features.first().map_or(0, GraphFeatureVector::len);
    if dim == 0 || features.iter().any(|f| f.len() != dim) {
        return Err(Error::DimensionMismatch(
            "graph feature vectors must share one non-zero length".into(),
        ));
    }
    let (classes, names) = encode_labels(labels);
    if names.len() < 2 {
        return Err(Error::InvalidParameter("labels contain a single class".into()));
    }
    let k = names.len();
    let x = DenseMatrix::from_fn(features.len(), dim, |i, j| features[i].values[j]);

    let assignments: Vec<Vec<usize>> = (0..trials)
        .map(|t| stratified_folds(&classes, folds, &mut stream_rng(seed, t, 0)))
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..trials).flat_map(|t| (0..folds).map(move |f| (t, f))).collect();
    let results: Vec<(usize, f64, usize)> = cells
        .par_iter()
        .map(|&(t, f)| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..x.nrows()).partition(|&i| assignments[t][i] == f);
            let acc = fold_accuracy(&x, &classes, k, &train, &test, seed, t, f)?;
            Ok((t, acc, test.len()))
        })
        .collect::<Result<_>>()?;

    let per_trial: Vec<f64> = (0..trials)
        .map(|t| {
            let (correct, total) = results
                .iter()
                .filter(|r| r.0 == t)
                .fold((0.0, 0usize), |(c, n), r| (c + r.1 * r.2 as f64, n + r.2));
            correct / total as f64
        })
        .collect();
    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let std = (per_trial.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / trials as f64).sqrt();
    Ok(EvalReport::new(
        Task::GraphClassify,
        &[("accuracy_mean", mean), ("accuracy_std", std)],
        seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn features(rows: Vec<Vec<f64>>) -> Vec<GraphFeatureVector> {
        rows.into_iter()
            .map(|values| GraphFeatureVector {
                values,
                n: 1,
                config: None,
            })
            .collect()
    }

    #[test]
    fn separable_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let labels: Vec<i64> = (0..60).map(|i| i % 2).collect();
        let rows = labels
            .iter()
            .map(|&l| {
                let sign = if l == 0 { -1.0 } else { 1.0 };
                vec![sign * rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0)]
            })
            .collect();
        let r = classify_graphs(&features(rows), &labels, 10, 2, 0).unwrap();
        assert!(r.metric("accuracy_mean").unwrap() >= 0.99);
    }

    #[test]
    fn shuffled_labels_at_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<Vec<f64>> = (0..100).map(|_| (0..5).map(|_| rng.random()).collect()).collect();
        let labels: Vec<i64> = (0..100).map(|i| i % 2).collect();
        let r = classify_graphs(&features(rows), &labels, 10, 3, 4).unwrap();
        assert!((r.metric("accuracy_mean").unwrap() - 0.5).abs() <= 0.1);
    }

    #[test]
    fn three_classes_and_determinism() {
        let labels: Vec<i64> = (0..45).map(|i| i % 3).collect();
        let rows = labels.iter().map(|&l| vec![l as f64 * 3.0, (l == 1) as i32 as f64]).collect();
        let f = features(rows);
        let a = classify_graphs(&f, &labels, 5, 2, 9).unwrap();
        assert_eq!(a, classify_graphs(&f, &labels, 5, 2, 9).unwrap());
        assert!(a.metric("accuracy_mean").unwrap() >= 0.99);
    }

    #[test]
    fn too_few_per_class() {
        let f = features(vec![vec![0.0]; 12]);
        let labels = [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1];
        assert!(classify_graphs(&f, &labels, 5, 1, 0).is_err());
    }
}
