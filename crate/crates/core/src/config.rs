//! Declarative pipeline configuration and its flat `key = value` text form.
//!
//! ```text
//! # structural embedding with the heat kernel at five scales
//! proximity.name = hk
//! nonlinearity.name = identity
//! embedding.name = cfs
//! embedding.dim = 10
//! scales = 0.01,0.1,1,10,100
//! ```
//!
//! Keys are dotted; `#` starts a comment. [`PipelineConfig::to_text`] emits
//! every key needed to rebuild the same config with [`PipelineConfig::from_text`].

use std::collections::BTreeMap;

use crate::embedding::{EmbeddingKind, EmbeddingMethod};
use crate::error::{Error, Result};
use crate::graph::{format_float, Graph};
use crate::nonlinearity::Nonlinearity;
use crate::proximity::{fabp_default_params, FabpC2, Operator, Proximity};

/// Positional embedding width used unless configured otherwise.
pub const DEFAULT_POSITIONAL_DIM: usize = 128;
/// Structural embedding width used unless configured otherwise.
pub const DEFAULT_STRUCTURAL_DIM: usize = 50;
/// Heat-kernel scales for multiscale structural embeddings and heat traces.
pub const DEFAULT_HK_SCALES: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FabpParams {
    Heuristic(FabpC2),
    Fixed { a: f64, c: f64 },
}

/// A proximity operator whose parameters may depend on the graph (FaBP's
/// heuristic) or be overridden per scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProximitySpec {
    Ppmi { window: usize, negative: f64 },
    HeatKernel { scale: f64 },
    Fabp(FabpParams),
    Ppr { beta: f64, normalized: bool },
    LapPinv,
    AdjPower { k: usize },
    RwPower { k: usize },
}

impl ProximitySpec {
    /// Tuned defaults for positional or structural use.
    pub fn default_for(op: Operator, kind: EmbeddingKind) -> Self {
        match op {
            Operator::Ppmi => ProximitySpec::Ppmi {
                window: 10,
                negative: 1.0,
            },
            Operator::HeatKernel => ProximitySpec::HeatKernel { scale: 0.1 },
            Operator::Fabp => match kind {
                EmbeddingKind::Positional => ProximitySpec::Fabp(FabpParams::Fixed { a: 1.0, c: 0.01 }),
                _ => ProximitySpec::Fabp(FabpParams::Heuristic(FabpC2::TraceDegreeSquared)),
            },
            Operator::Ppr => ProximitySpec::Ppr {
                beta: 0.01,
                normalized: false,
            },
            Operator::LapPinv => ProximitySpec::LapPinv,
            Operator::AdjPower => ProximitySpec::AdjPower { k: 2 },
            Operator::RwPower => ProximitySpec::RwPower { k: 2 },
        }
    }

    pub fn operator(&self) -> Operator {
        match self {
            ProximitySpec::Ppmi { .. } => Operator::Ppmi,
            ProximitySpec::HeatKernel { .. } => Operator::HeatKernel,
            ProximitySpec::Fabp(_) => Operator::Fabp,
            ProximitySpec::Ppr { .. } => Operator::Ppr,
            ProximitySpec::LapPinv => Operator::LapPinv,
            ProximitySpec::AdjPower { .. } => Operator::AdjPower,
            ProximitySpec::RwPower { .. } => Operator::RwPower,
        }
    }

    /// Whether this operator has a scale parameter usable in multiscale runs.
    pub fn supports_scales(&self) -> bool {
        !matches!(self, ProximitySpec::Fabp(_) | ProximitySpec::LapPinv)
    }

    fn check_scale(&self, s: f64) -> Result<()> {
        let integral = s >= 1.0 && s.fract() == 0.0;
        let ok = match self {
            ProximitySpec::Ppmi { .. } | ProximitySpec::AdjPower { .. } | ProximitySpec::RwPower { .. } => {
                integral
            }
            ProximitySpec::HeatKernel { .. } => s >= 0.0 && s.is_finite(),
            ProximitySpec::Ppr { .. } => s > 0.0 && s < 1.0,
            ProximitySpec::Fabp(_) | ProximitySpec::LapPinv => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "scale {s} is not valid for operator {}",
                self.operator()
            )))
        }
    }

    /// Concrete parameters for `g`, with `scale` replacing the operator's
    /// scale parameter (`T`, `s`, `beta` or `k`).
    pub fn resolve(&self, g: &Graph, scale: Option<f64>) -> Result<Proximity> {
        if let Some(s) = scale {
            self.check_scale(s)?;
        }
        Ok(match *self {
            ProximitySpec::Ppmi { window, negative } => Proximity::Ppmi {
                window: scale.map_or(window, |s| s as usize),
                negative,
            },
            ProximitySpec::HeatKernel { scale: s } => Proximity::HeatKernel {
                scale: scale.unwrap_or(s),
            },
            ProximitySpec::Fabp(FabpParams::Fixed { a, c }) => Proximity::Fabp { a, c },
            ProximitySpec::Fabp(FabpParams::Heuristic(variant)) => {
                let (a, c) = fabp_default_params(g, variant)?;
                Proximity::Fabp { a, c }
            }
            ProximitySpec::Ppr { beta, normalized } => Proximity::Ppr {
                beta: scale.unwrap_or(beta),
                normalized,
            },
            ProximitySpec::LapPinv => Proximity::LapPinv,
            ProximitySpec::AdjPower { k } => Proximity::AdjPower {
                k: scale.map_or(k, |s| s as usize),
            },
            ProximitySpec::RwPower { k } => Proximity::RwPower {
                k: scale.map_or(k, |s| s as usize),
            },
        })
    }
}

/// One pipeline run: proximity, filter, embedding, width, and optional scales.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub proximity: ProximitySpec,
    pub nonlinearity: Nonlinearity,
    pub embedding: EmbeddingMethod,
    /// Width of each per-scale block.
    pub dim: usize,
    pub scales: Option<Vec<f64>>,
    pub cfs_normalize: bool,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(op: Operator, nonlinearity: Nonlinearity, embedding: EmbeddingMethod) -> Self {
        let dim = match embedding {
            EmbeddingMethod::Svd => DEFAULT_POSITIONAL_DIM,
            EmbeddingMethod::Cfs => DEFAULT_STRUCTURAL_DIM,
            EmbeddingMethod::Diag => 1,
        };
        PipelineConfig {
            proximity: ProximitySpec::default_for(op, embedding.kind()),
            nonlinearity,
            embedding,
            dim,
            scales: None,
            cfs_normalize: true,
            seed: 0,
        }
    }

    pub fn with_proximity(mut self, proximity: ProximitySpec) -> Self {
        self.proximity = proximity;
        self
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn with_scales(mut self, scales: Vec<f64>) -> Self {
        self.scales = Some(scales);
        self
    }

    /// Single-scale heat kernel, no filter, 50-dimensional CFS.
    pub fn graphwave() -> Self {
        PipelineConfig::new(Operator::HeatKernel, Nonlinearity::Identity, EmbeddingMethod::Cfs)
    }

    /// PPMI with `T = 10`, `b = 1`, log filter, 128-dimensional SVD.
    pub fn netmf() -> Self {
        PipelineConfig::new(Operator::Ppmi, Nonlinearity::Log, EmbeddingMethod::Svd)
    }

    /// Laplacian pseudoinverse binarized at the median, SVD.
    pub fn infinitewalk() -> Self {
        PipelineConfig::new(Operator::LapPinv, Nonlinearity::Bin(50.0), EmbeddingMethod::Svd)
    }

    /// Heat-kernel diagonals at `scales`; mean-pooled this is the heat trace.
    pub fn netlsd(scales: &[f64]) -> Self {
        PipelineConfig::new(Operator::HeatKernel, Nonlinearity::Identity, EmbeddingMethod::Diag)
            .with_scales(scales.to_vec())
    }

    /// Return probabilities for walks of length `1..=max_k`.
    pub fn retgk(max_k: usize) -> Self {
        PipelineConfig::new(Operator::RwPower, Nonlinearity::Identity, EmbeddingMethod::Diag)
            .with_scales((1..=max_k).map(|k| k as f64).collect())
    }

    /// Structural CFS features for graph classification: 10 columns per
    /// scale over five scales for HK, Adj and RW; 50 columns otherwise.
    pub fn graph_classification(op: Operator, nonlinearity: Nonlinearity) -> Self {
        let cfg = PipelineConfig::new(op, nonlinearity, EmbeddingMethod::Cfs);
        match op {
            Operator::HeatKernel => cfg.with_dim(10).with_scales(DEFAULT_HK_SCALES.to_vec()),
            Operator::AdjPower | Operator::RwPower => {
                cfg.with_dim(10).with_scales(vec![1.0, 2.0, 3.0, 4.0, 5.0])
            }
            _ => cfg,
        }
    }

    /// Total output width.
    pub fn total_dim(&self) -> usize {
        self.dim * self.scales.as_ref().map_or(1, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        match self.embedding {
            EmbeddingMethod::Cfs if self.dim < 2 || self.dim % 2 != 0 => {
                return Err(Error::Config(format!(
                    "cfs needs an even dimension >= 2, got {}",
                    self.dim
                )))
            }
            EmbeddingMethod::Svd if self.dim == 0 => {
                return Err(Error::Config("svd dimension must be >= 1".into()))
            }
            EmbeddingMethod::Diag if self.dim != 1 => {
                return Err(Error::Config("diag embedding has dimension 1".into()))
            }
            _ => {}
        }
        if let Nonlinearity::Bin(p) = self.nonlinearity {
            if !(0.0..100.0).contains(&p) {
                return Err(Error::Config(format!("percentile {p} outside [0, 100)")));
            }
        }
        if let Some(scales) = &self.scales {
            if scales.is_empty() {
                return Err(Error::Config("scale list is empty".into()));
            }
            if !self.proximity.supports_scales() {
                return Err(Error::Config(format!(
                    "operator {} has no scale parameter",
                    self.proximity.operator()
                )));
            }
            for &s in scales {
                self.proximity.check_scale(s)?;
            }
        }
        Ok(())
    }

    /// Ordered `(key, value)` pairs.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(&str, String)> = vec![("proximity.name", self.proximity.operator().name().into())];
        match self.proximity {
            ProximitySpec::Ppmi { window, negative } => {
                out.push(("proximity.window", window.to_string()));
                out.push(("proximity.negative", format_float(negative)));
            }
            ProximitySpec::HeatKernel { scale } => out.push(("proximity.scale", format_float(scale))),
            ProximitySpec::Fabp(FabpParams::Fixed { a, c }) => {
                out.push(("proximity.a", format_float(a)));
                out.push(("proximity.c", format_float(c)));
            }
            ProximitySpec::Fabp(FabpParams::Heuristic(variant)) => {
                out.push(("proximity.c2", c2_name(variant).into()))
            }
            ProximitySpec::Ppr { beta, normalized } => {
                out.push(("proximity.beta", format_float(beta)));
                out.push(("proximity.normalized", normalized.to_string()));
            }
            ProximitySpec::LapPinv => {}
            ProximitySpec::AdjPower { k } | ProximitySpec::RwPower { k } => {
                out.push(("proximity.power", k.to_string()))
            }
        }
        out.push(("nonlinearity.name", self.nonlinearity.to_string()));
        out.push(("embedding.name", self.embedding.name().into()));
        out.push(("embedding.dim", self.dim.to_string()));
        out.push(("embedding.normalize", self.cfs_normalize.to_string()));
        if let Some(scales) = &self.scales {
            let joined: Vec<String> = scales.iter().map(|&s| format_float(s)).collect();
            out.push(("scales", joined.join(",")));
        }
        out.push(("seed", self.seed.to_string()));
        out.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
    }

    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_map(&parse_kv(text)?)
    }

    /// Builds a config from dotted keys. `proximity.name` and
    /// `embedding.name` are required; everything else has a default.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        const KNOWN: [&str; 16] = [
            "proximity.name",
            "proximity.window",
            "proximity.negative",
            "proximity.scale",
            "proximity.a",
            "proximity.c",
            "proximity.c2",
            "proximity.beta",
            "proximity.normalized",
            "proximity.power",
            "nonlinearity.name",
            "embedding.name",
            "embedding.dim",
            "embedding.normalize",
            "scales",
            "seed",
        ];
        if let Some(key) = map.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key {key:?}")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let required = |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing key {k:?}")));

        let op_name = required("proximity.name")?;
        let op = Operator::from_name(op_name)
            .ok_or_else(|| Error::Config(format!("unknown operator {op_name:?}")))?;
        let emb_name = required("embedding.name")?;
        let embedding = EmbeddingMethod::from_name(emb_name)
            .ok_or_else(|| Error::Config(format!("unknown embedding {emb_name:?}")))?;
        let nonlinearity = match get("nonlinearity.name") {
            Some(s) => Nonlinearity::parse(s)?,
            None => Nonlinearity::Identity,
        };
        let mut cfg = PipelineConfig::new(op, nonlinearity, embedding);

        cfg.proximity = match cfg.proximity {
            ProximitySpec::Ppmi { window, negative } => ProximitySpec::Ppmi {
                window: parse_or(get("proximity.window"), window)?,
                negative: parse_or(get("proximity.negative"), negative)?,
            },
            ProximitySpec::HeatKernel { scale } => ProximitySpec::HeatKernel {
                scale: parse_or(get("proximity.scale"), scale)?,
            },
            ProximitySpec::Fabp(default) => {
                match (get("proximity.a"), get("proximity.c"), get("proximity.c2")) {
                    (Some(a), Some(c), None) => ProximitySpec::Fabp(FabpParams::Fixed {
                        a: parse_value("proximity.a", a)?,
                        c: parse_value("proximity.c", c)?,
                    }),
                    (None, None, Some(v)) => ProximitySpec::Fabp(FabpParams::Heuristic(parse_c2(v)?)),
                    (None, None, None) => ProximitySpec::Fabp(default),
                    _ => {
                        return Err(Error::Config(
                            "fabp takes either both proximity.a and proximity.c, or proximity.c2".into(),
                        ))
                    }
                }
            }
            ProximitySpec::Ppr { beta, normalized } => ProximitySpec::Ppr {
                beta: parse_or(get("proximity.beta"), beta)?,
                normalized: parse_or(get("proximity.normalized"), normalized)?,
            },
            ProximitySpec::LapPinv => ProximitySpec::LapPinv,
            ProximitySpec::AdjPower { k } => ProximitySpec::AdjPower {
                k: parse_or(get("proximity.power"), k)?,
            },
            ProximitySpec::RwPower { k } => ProximitySpec::RwPower {
                k: parse_or(get("proximity.power"), k)?,
            },
        };
        cfg.dim = parse_or(get("embedding.dim"), cfg.dim)?;
        cfg.cfs_normalize = parse_or(get("embedding.normalize"), cfg.cfs_normalize)?;
        cfg.seed = parse_or(get("seed"), cfg.seed)?;
        if let Some(list) = get("scales") {
            let list = list.trim();
            if !list.is_empty() {
                cfg.scales = Some(
                    list.split(',')
                        .map(|s| parse_value("scales", s.trim()))
                        .collect::<Result<_>>()?,
                );
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn c2_name(variant: FabpC2) -> &'static str {
    match variant {
        FabpC2::TraceDegreeSquared => "trace_d2",
        FabpC2::TraceDegree => "trace_d",
    }
}

fn parse_c2(s: &str) -> Result<FabpC2> {
    match s {
        "trace_d2" => Ok(FabpC2::TraceDegreeSquared),
        "trace_d" => Ok(FabpC2::TraceDegree),
        _ => Err(Error::Config(format!("unknown proximity.c2 {s:?}"))),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn parse_or<T: std::str::FromStr>(value: Option<&str>, default: T) -> Result<T> {
    match value {
        Some(v) => parse_value("config", v),
        None => Ok(default),
    }
}

/// Parses `key = value` lines into a map; later keys win.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        map.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn presets_round_trip() {
        for cfg in [
            PipelineConfig::graphwave(),
            PipelineConfig::netmf(),
            PipelineConfig::infinitewalk(),
            PipelineConfig::netlsd(&DEFAULT_HK_SCALES),
            PipelineConfig::retgk(5),
            PipelineConfig::graph_classification(Operator::Fabp, Nonlinearity::Log),
        ] {
            assert_eq!(PipelineConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        }
    }

    #[test]
    fn preset_values() {
        let netmf = PipelineConfig::netmf();
        assert_eq!(netmf.proximity, ProximitySpec::Ppmi { window: 10, negative: 1.0 });
        assert_eq!(netmf.dim, 128);
        let gw = PipelineConfig::graphwave();
        assert_eq!(gw.proximity, ProximitySpec::HeatKernel { scale: 0.1 });
        assert_eq!(gw.dim, 50);
        assert_eq!(
            PipelineConfig::new(Operator::Fabp, Nonlinearity::Identity, EmbeddingMethod::Svd).proximity,
            ProximitySpec::Fabp(FabpParams::Fixed { a: 1.0, c: 0.01 })
        );
        assert_eq!(
            PipelineConfig::new(Operator::Ppr, Nonlinearity::Identity, EmbeddingMethod::Cfs).proximity,
            ProximitySpec::Ppr { beta: 0.01, normalized: false }
        );
        assert_eq!(PipelineConfig::graph_classification(Operator::HeatKernel, Nonlinearity::Identity).total_dim(), 50);
    }

    #[test]
    fn parses_file_with_comments() {
        let text = "# demo\nproximity.name = fabp\nproximity.c2 = trace_d # table form\n\
                    nonlinearity.name = bin:95\nembedding.name = cfs\nembedding.dim = 20\n";
        let cfg = PipelineConfig::from_text(text).unwrap();
        assert_eq!(cfg.proximity, ProximitySpec::Fabp(FabpParams::Heuristic(FabpC2::TraceDegree)));
        assert_eq!(cfg.nonlinearity, Nonlinearity::Bin(95.0));
        assert_eq!(cfg.dim, 20);
    }

    #[test]
    fn rejects_invalid_configs() {
        let base = "proximity.name = hk\nembedding.name = cfs\n";
        assert!(PipelineConfig::from_text(base).is_ok());
        assert!(PipelineConfig::from_text("embedding.name = cfs\n").is_err());
        assert!(PipelineConfig::from_text("proximity.name = katz\nembedding.name = cfs\n").is_err());
        assert!(PipelineConfig::from_text(&format!("{base}embedding.dim = 7\n")).is_err());
        assert!(PipelineConfig::from_text(&format!("{base}bogus = 1\n")).is_err());
        assert!(PipelineConfig::from_text(&format!("{base}scales = -1\n")).is_err());
        assert!(PipelineConfig::from_text("proximity.name = fabp\nembedding.name = cfs\nscales = 1,2\n").is_err());
        assert!(PipelineConfig::from_text("proximity.name = adj\nembedding.name = cfs\nscales = 1.5\n").is_err());
        assert!(PipelineConfig::from_text("proximity.name = fabp\nproximity.a = 1\nembedding.name = svd\n").is_err());
        assert!(PipelineConfig::from_text("proximity.name = hk\nembedding.name = diag\nembedding.dim = 3\n").is_err());
        assert!(PipelineConfig::from_text("no equals sign\n").is_err());
    }

    #[test]
    fn resolve_applies_scales() {
        let g = Graph::complete(3);
        let spec = ProximitySpec::AdjPower { k: 2 };
        assert_eq!(spec.resolve(&g, Some(4.0)).unwrap(), Proximity::AdjPower { k: 4 });
        assert_eq!(spec.resolve(&g, None).unwrap(), Proximity::AdjPower { k: 2 });
        let hk = ProximitySpec::HeatKernel { scale: 0.1 };
        assert_eq!(hk.resolve(&g, Some(10.0)).unwrap(), Proximity::HeatKernel { scale: 10.0 });
        assert!(ProximitySpec::LapPinv.resolve(&g, Some(1.0)).is_err());
    }

    fn arb_config() -> impl Strategy<Value = PipelineConfig> {
        let spec = prop_oneof![
            (1usize..20, 1.0f64..5.0).prop_map(|(window, negative)| ProximitySpec::Ppmi { window, negative }),
            (0.0f64..100.0).prop_map(|scale| ProximitySpec::HeatKernel { scale }),
            (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, c)| ProximitySpec::Fabp(FabpParams::Fixed { a, c })),
            Just(ProximitySpec::Fabp(FabpParams::Heuristic(FabpC2::TraceDegree))),
            (0.001f64..0.999, any::<bool>()).prop_map(|(beta, normalized)| ProximitySpec::Ppr { beta, normalized }),
            Just(ProximitySpec::LapPinv),
            (1usize..6).prop_map(|k| ProximitySpec::AdjPower { k }),
            (1usize..6).prop_map(|k| ProximitySpec::RwPower { k }),
        ];
        let filter = prop_oneof![
            Just(Nonlinearity::Identity),
            Just(Nonlinearity::Log),
            (0.0f64..99.9).prop_map(Nonlinearity::Bin),
        ];
        let emb = prop_oneof![
            (1usize..200).prop_map(|d| (EmbeddingMethod::Svd, d)),
            (1usize..100).prop_map(|h| (EmbeddingMethod::Cfs, 2 * h)),
            Just((EmbeddingMethod::Diag, 1)),
        ];
        (spec, filter, emb, any::<bool>(), any::<u64>(), 1usize..6).prop_map(
            |(proximity, nonlinearity, (embedding, dim), cfs_normalize, seed, n_scales)| {
                let scales = if proximity.supports_scales() && seed % 2 == 0 {
                    let s: Vec<f64> = match proximity {
                        ProximitySpec::Ppr { .. } => (1..=n_scales).map(|i| i as f64 / 10.0).collect(),
                        ProximitySpec::HeatKernel { .. } => (0..n_scales).map(|i| 0.37 * i as f64).collect(),
                        _ => (1..=n_scales).map(|i| i as f64).collect(),
                    };
                    Some(s)
                } else {
                    None
                };
                PipelineConfig { proximity, nonlinearity, embedding, dim, scales, cfs_normalize, seed }
            },
        )
    }

    proptest! {
        #[test]
        fn text_round_trip(cfg in arb_config()) {
            prop_assert_eq!(PipelineConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        }
    }
}
