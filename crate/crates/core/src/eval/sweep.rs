//! Rank aggregation for design-grid sweeps.
//!
//! Each [`SweepRow`] holds one design's accuracy on several benchmarks
//! (datasets or repeated splits). Designs are ranked per benchmark, 1 being
//! best, with tied accuracies sharing the average of their ranks.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub proximity: String,
    pub nonlinearity: String,
    pub accuracies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedRow {
    pub proximity: String,
    pub nonlinearity: String,
    pub avg_rank: f64,
    pub avg_accuracy: f64,
    pub max_accuracy: f64,
}

/// Average rank, mean accuracy, and max accuracy for every row, in input
/// order. All rows must have the same number of accuracies.
pub fn rank_rows(rows: &[SweepRow]) -> Vec<RankedRow> {
    let benchmarks = rows.first().map_or(0, |r| r.accuracies.len());
    assert!(
        rows.iter().all(|r| r.accuracies.len() == benchmarks),
        "sweep rows have different benchmark counts"
    );
    let mut rank_sum = vec![0.0; rows.len()];
    for b in 0..benchmarks {
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&i, &j| rows[j].accuracies[b].total_cmp(&rows[i].accuracies[b]));
        let mut start = 0;
        while start < order.len() {
            let acc = rows[order[start]].accuracies[b];
            let end = start
                + order[start..]
                    .iter()
                    .take_while(|&&i| rows[i].accuracies[b] == acc)
                    .count();
            // Positions start..end share ranks start+1..=end.
            let shared = (start + 1 + end) as f64 / 2.0;
            order[start..end].iter().for_each(|&i| rank_sum[i] += shared);
            start = end;
        }
    }
    rows.iter()
        .zip(rank_sum)
        .map(|(r, sum)| {
            let k = r.accuracies.len().max(1) as f64;
            RankedRow {
                proximity: r.proximity.clone(),
                nonlinearity: r.nonlinearity.clone(),
                avg_rank: sum / k,
                avg_accuracy: r.accuracies.iter().sum::<f64>() / k,
                max_accuracy: r.accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrilldownRow {
    pub choice: String,
    pub avg_rank: f64,
    pub avg_accuracy: f64,
    pub max_accuracy: f64,
}

/// Groups ranked rows by one design choice (e.g. the proximity) and averages
/// their rank and accuracy; max accuracy is the best over the group. Groups
/// appear in order of first occurrence.
pub fn drilldown(ranked: &[RankedRow], choice: impl Fn(&RankedRow) -> &str) -> Vec<DrilldownRow> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<&RankedRow>> = BTreeMap::new();
    for r in ranked {
        let key = choice(r).to_string();
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let k = members.len() as f64;
            DrilldownRow {
                avg_rank: members.iter().map(|r| r.avg_rank).sum::<f64>() / k,
                avg_accuracy: members.iter().map(|r| r.avg_accuracy).sum::<f64>() / k,
                max_accuracy: members.iter().map(|r| r.max_accuracy).fold(f64::NEG_INFINITY, f64::max),
                choice: key,
            }
        })
        .collect()
}
