use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::config::PipelineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    NodeClassify,
    NodeCluster,
    GraphClassify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::NodeClassify => "node-classify",
            Task::NodeCluster => "node-cluster",
            Task::GraphClassify => "graph-classify",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Named metric values from one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub task: Task,
    pub metrics: BTreeMap<String, f64>,
    pub config: Option<PipelineConfig>,
    pub seed: u64,
}

impl EvalReport {
    pub(crate) fn new(task: Task, metrics: &[(&str, f64)], seed: u64) -> Self {
        let report = EvalReport {
            task,
            metrics: metrics.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            config: None,
            seed,
        };
        report.assert_ranges();
        report
    }

    pub fn with_config(mut self, config: PipelineConfig) -> Self {
        self.config = Some(config);
        self
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    /// Panics if a metric lies outside its defined range; a violation is a
    /// bug in the metric code, not a property of the input.
    fn assert_ranges(&self) {
        for (name, &v) in &self.metrics {
            let (lo, hi) = match name.as_str() {
                "silhouette" => (-1.0, 1.0),
                "accuracy_std" => (0.0, 0.5),
                _ => (0.0, 1.0),
            };
            assert!(
                v.is_finite() && (lo - 1e-12..=hi + 1e-12).contains(&v),
                "metric {name} = {v} outside [{lo}, {hi}]"
            );
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Two-column `metric  value` table.
    pub fn to_table(&self) -> String {
        let width = self.metrics.keys().map(String::len).max().unwrap_or(0).max(6);
        let mut out = format!("task: {}  seed: {}\n", self.task, self.seed);
        out.push_str(&format!("{:width$}  value\n", "metric"));
        for (k, v) in &self.metrics {
            out.push_str(&format!("{k:width$}  {v:.4}\n"));
        }
        out
    }
}

impl Serialize for EvalReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let config: Option<BTreeMap<String, String>> =
            self.config.as_ref().map(|c| c.to_pairs().into_iter().collect());
        let mut s = serializer.serialize_struct("EvalReport", 4)?;
        s.serialize_field("task", &self.task)?;
        s.serialize_field("metrics", &self.metrics)?;
        s.serialize_field("config", &config)?;
        s.serialize_field("seed", &self.seed)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_has_all_fields() {
        let r = EvalReport::new(Task::NodeCluster, &[("homogeneity", 1.0), ("silhouette", -0.2)], 7)
            .with_config(PipelineConfig::graphwave());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["task"], "node-cluster");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["metrics"]["silhouette"], -0.2);
        assert_eq!(v["config"]["proximity.name"], "hk");
        assert!(r.to_table().contains("homogeneity"));
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn out_of_range_metric_panics() {
        EvalReport::new(Task::NodeClassify, &[("micro_f1", 1.5)], 0);
    }
}
