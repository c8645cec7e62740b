use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use proxemb::config::{parse_kv, DEFAULT_HK_SCALES};
use proxemb::{EmbeddingMethod, Nonlinearity, Operator, PipelineConfig};

use crate::failure::{CliResult, Failure};
use crate::io::read_text;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Graphwave,
    Netmf,
    Infinitewalk,
    Netlsd,
    Retgk,
}

impl Preset {
    fn config(self) -> PipelineConfig {
        match self {
            Preset::Graphwave => PipelineConfig::graphwave(),
            Preset::Netmf => PipelineConfig::netmf(),
            Preset::Infinitewalk => PipelineConfig::infinitewalk(),
            Preset::Netlsd => PipelineConfig::netlsd(&DEFAULT_HK_SCALES),
            Preset::Retgk => PipelineConfig::retgk(5),
        }
    }
}

pub fn parse_operator(s: &str) -> Result<Operator, String> {
    Operator::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Operator::ALL.iter().map(|o| o.name()).collect();
        format!("unknown operator {s:?}; expected one of {}", names.join(", "))
    })
}

pub fn parse_nonlinearity(s: &str) -> Result<Nonlinearity, String> {
    Nonlinearity::parse(s).map_err(|e| e.to_string())
}

pub fn parse_embedding(s: &str) -> Result<EmbeddingMethod, String> {
    EmbeddingMethod::from_name(s).ok_or_else(|| format!("unknown embedding {s:?}; expected svd, cfs or diag"))
}

/// Pipeline selection. Layers apply in order: preset, config file, flags,
/// then `--set` overrides.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Start from a named configuration.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Proximity operator: ppmi, hk, fabp, ppr, lap_pinv, adj, rw.
    #[arg(long, value_parser = parse_operator)]
    pub proximity: Option<Operator>,
    /// Filter: identity, log, or bin:<percentile>.
    #[arg(long, value_parser = parse_nonlinearity)]
    pub nonlinearity: Option<Nonlinearity>,
    /// Embedding function: svd, cfs, diag.
    #[arg(long, value_parser = parse_embedding)]
    pub embedding: Option<EmbeddingMethod>,
    /// Columns per scale.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated scales for a multiscale embedding.
    #[arg(long)]
    pub scales: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Any config key, as KEY=VALUE. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<PipelineConfig> {
        let mut map: BTreeMap<String, String> = match self.preset {
            Some(p) => p.config().to_pairs().into_iter().collect(),
            None => BTreeMap::new(),
        };
        if let Some(path) = &self.config {
            map.extend(parse_kv(&read_text(path)?)?);
        }
        if let Some(op) = self.proximity {
            if map.get("proximity.name").map(String::as_str) != Some(op.name()) {
                // Parameters of a different operator do not carry over.
                map.retain(|k, _| !k.starts_with("proximity.") && k != "scales");
                map.insert("proximity.name".into(), op.name().into());
            }
        }
        if let Some(emb) = self.embedding {
            if map.get("embedding.name").map(String::as_str) != Some(emb.name()) {
                map.remove("embedding.dim");
                map.insert("embedding.name".into(), emb.name().into());
            }
        }
        if let Some(nl) = self.nonlinearity {
            map.insert("nonlinearity.name".into(), nl.to_string());
        }
        if let Some(dim) = self.dim {
            map.insert("embedding.dim".into(), dim.to_string());
        }
        if let Some(scales) = &self.scales {
            map.insert("scales".into(), scales.clone());
        }
        if let Some(seed) = self.seed {
            map.insert("seed".into(), seed.to_string());
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            map.insert(k.trim().into(), v.trim().into());
        }
        if !map.contains_key("proximity.name") || !map.contains_key("embedding.name") {
            return Err(Failure::usage(
                "no pipeline selected: pass --preset, --config, or both --proximity and --embedding",
            ));
        }
        Ok(PipelineConfig::from_map(&map)?)
    }
}
