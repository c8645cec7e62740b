use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Independent RNG stream for one `(trial, fold)` cell, so that running cells
/// in any order or in parallel gives the same numbers.
pub fn stream_rng(seed: u64, trial: usize, fold: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((trial as u64) << 32) | fold as u64);
    rng
}

fn by_class(classes: &[usize]) -> Vec<Vec<usize>> {
    let k = classes.iter().max().map_or(0, |&m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (i, &c) in classes.iter().enumerate() {
        groups[c].push(i);
    }
    groups
}

/// Stratified train/test split. Each class with at least two members puts at
/// least one in each side; the train share is `round(fraction * size)`.
/// Both index lists are sorted.
pub fn stratified_split(
    classes: &[usize],
    train_fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut group in by_class(classes) {
        group.shuffle(rng);
        let size = group.len();
        let cut = if size < 2 {
            size
        } else {
            ((train_fraction * size as f64).round() as usize).clamp(1, size - 1)
        };
        train.extend_from_slice(&group[..cut]);
        test.extend_from_slice(&group[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified `k`-fold assignment: `fold[i]` for every sample. Members of each
/// class are dealt round-robin after shuffling, continuing where the
/// previous class stopped so fold sizes differ by at most one.
pub fn stratified_folds(classes: &[usize], k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    let mut fold = vec![0; classes.len()];
    let mut next = 0;
    for (c, mut group) in by_class(classes).into_iter().enumerate() {
        if group.len() < k {
            return Err(Error::InvalidParameter(format!(
                "class {c} has {} samples, fewer than {k} folds",
                group.len()
            )));
        }
        group.shuffle(rng);
        for i in group {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}
