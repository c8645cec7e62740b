//! Graph embeddings as a three-stage pipeline: a node proximity matrix, an
//! elementwise filter, and an embedding function.
//!
//! ```
//! use proxemb::config::DEFAULT_HK_SCALES;
//! use proxemb::{run_pipeline, Graph, PipelineConfig};
//!
//! let g = Graph::cycle(12);
//! let cfg = PipelineConfig::graphwave()
//!     .with_dim(10)
//!     .with_scales(DEFAULT_HK_SCALES.to_vec());
//! let y = run_pipeline(&g, &cfg).unwrap();
//! assert_eq!(y.matrix.shape(), (12, 50));
//! ```
//!
//! Positional embeddings (SVD) place nearby nodes close together; structural
//! embeddings (CFS and the diagonal) give automorphic nodes identical rows.

pub mod config;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod features;
pub mod graph;
pub mod nonlinearity;
pub mod proximity;
pub mod synth;

pub use config::{FabpParams, PipelineConfig, ProximitySpec};
pub use embedding::{
    cfs_embed, diag_embed, multiscale_concat, run_pipeline, svd_embed, EmbeddingKind,
    EmbeddingMatrix, EmbeddingMethod,
};
pub use error::{Error, Result};
pub use eval::{EvalReport, RowStats, Task};
pub use features::{aggregate_mean, embed_graph_set, netlsd_features, retgk_features, GraphFeatureVector};
pub use graph::{DenseMatrix, Graph, LoadedGraph, NodeIds};
pub use nonlinearity::{FilteredMatrix, Filter, Nonlinearity};
pub use proximity::{FabpC2, Operator, Proximity, ProximityMatrix};
pub use synth::{generate_role_graph, RoleGraph, Shape};
