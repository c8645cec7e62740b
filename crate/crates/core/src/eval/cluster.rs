//! Single-linkage agglomerative clustering and entropy-based cluster metrics.

use std::collections::BTreeMap;

use super::report::{EvalReport, Task};
use super::{check_labels, encode_labels};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::graph::DenseMatrix;

fn pairwise_distances(x: &DenseMatrix) -> DenseMatrix {
    let n = x.nrows();
    let mut d = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let dist = (x.row(i) - x.row(j)).norm();
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    d
}

/// Single-linkage clusters of the rows of `x`, cut at `k` clusters. Clusters
/// are numbered by their smallest member.
///
/// Single linkage merges along a minimum spanning tree, so cutting the
/// `k - 1` heaviest tree edges gives the same partition as stopping the
/// agglomeration at `k` clusters. Among equal weights the later-added edge
/// is cut first.
pub fn single_linkage(x: &DenseMatrix, k: usize) -> Result<Vec<usize>> {
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "cluster count {k} must lie in 1..={n}"
        )));
    }
    let dist = pairwise_distances(x);

    // Prim's algorithm on the dense distance matrix.
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![0usize; n];
    let mut tree: Vec<(f64, usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    best[0] = 0.0;
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("a node remains outside the tree");
        in_tree[u] = true;
        if step > 0 {
            tree.push((best[u], parent[u], u));
        }
        for v in 0..n {
            if !in_tree[v] && dist[(u, v)] < best[v] {
                best[v] = dist[(u, v)];
                parent[v] = u;
            }
        }
    }

    let mut order: Vec<usize> = (0..tree.len()).collect();
    order.sort_by(|&a, &b| tree[b].0.total_cmp(&tree[a].0).then(b.cmp(&a)));
    let cut: Vec<bool> = {
        let mut c = vec![false; tree.len()];
        order.iter().take(k - 1).for_each(|&e| c[e] = true);
        c
    };

    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut v: usize) -> usize {
        while root[v] != v {
            root[v] = root[root[v]];
            v = root[v];
        }
        v
    }
    for (e, &(_, u, v)) in tree.iter().enumerate() {
        if !cut[e] {
            let (ru, rv) = (find(&mut root, u), find(&mut root, v));
            root[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut ids = BTreeMap::new();
    Ok((0..n)
        .map(|v| {
            let r = find(&mut root, v);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect())
}

fn entropy(counts: impl Iterator<Item = usize>, total: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// `H(A | B)` and `H(A)` from paired assignments.
fn conditional_entropy(a: &[usize], b: &[usize]) -> (f64, f64) {
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut a_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut b_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *a_counts.entry(x).or_default() += 1;
        *b_counts.entry(y).or_default() += 1;
    }
    let h_a_given_b: f64 = joint
        .iter()
        .map(|(&(_, y), &c)| {
            let c = c as f64;
            -(c / n) * (c / b_counts[&y] as f64).ln()
        })
        .sum();
    (h_a_given_b.max(0.0), entropy(a_counts.into_values(), n))
}

/// `1 - H(classes | clusters) / H(classes)`; `1` when the classes have zero
/// entropy.
pub fn homogeneity(truth: &[usize], predicted: &[usize]) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    let (h_cond, h) = conditional_entropy(truth, predicted);
    if h == 0.0 {
        1.0
    } else {
        (1.0 - h_cond / h).clamp(0.0, 1.0)
    }
}

/// `1 - H(clusters | classes) / H(clusters)`.
pub fn completeness(truth: &[usize], predicted: &[usize]) -> f64 {
    homogeneity(predicted, truth)
}

/// Mean silhouette over all rows. Rows in singleton clusters score 0, and
/// the whole score is 0 with fewer than two clusters.
pub fn silhouette(x: &DenseMatrix, clusters: &[usize]) -> f64 {
    let n = x.nrows();
    let k = clusters.iter().max().map_or(0, |&m| m + 1);
    if k < 2 || n == 0 {
        return 0.0;
    }
    let dist = pairwise_distances(x);
    let mut sizes = vec![0usize; k];
    clusters.iter().for_each(|&c| sizes[c] += 1);
    let total: f64 = (0..n)
        .map(|i| {
            let own = clusters[i];
            if sizes[own] < 2 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in 0..n {
                sums[clusters[j]] += dist[(i, j)];
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .sum();
    total / n as f64
}

/// Single-linkage clustering into `k` clusters, scored against `true_roles`.
pub fn cluster_nodes(y: &EmbeddingMatrix, k: usize, true_roles: &[i64]) -> Result<EvalReport> {
    check_labels(y.node_count(), true_roles)?;
    let clusters = single_linkage(&y.matrix, k)?;
    let (truth, _) = encode_labels(true_roles);
    Ok(EvalReport::new(
        Task::NodeCluster,
        &[
            ("homogeneity", homogeneity(&truth, &clusters)),
            ("completeness", completeness(&truth, &clusters)),
            ("silhouette", silhouette(&y.matrix, &clusters)),
        ],
        0,
    ))
}
