//! Gaussian graphical model selection by multiple testing.
//!
//! A graph (undirected, bidirected, or a DAG with a known well-numbering) is
//! selected from multivariate normal data by testing one vanishing
//! (partial) correlation per vertex pair and drawing an edge exactly where
//! the hypothesis is rejected. The p-value adjustments in [`testing`]
//! control the family-wise error rate and its relaxations (k-GFWER,
//! λ-TPPFP, FDR) for false edge inclusion; [`simulation`] checks that
//! control empirically.
//!
//! Vertices are 0-based indices everywhere in the API. Textual formats
//! (edge lists, reports) use 1-based labels or variable names.

pub mod error;
pub mod graph;
pub mod linalg;
pub mod selection;
pub mod simulation;
pub mod stats;
pub mod testing;

pub use error::{Error, Result};
pub use graph::{EdgeKind, Graph, VertexOrder, VertexSet};
pub use selection::{
    run_selection, GraphClass, PriorKnowledge, Reduction, SelectionConfig, SelectionResult,
};
pub use stats::{summarize, CovarianceSummary, Dataset};
pub use testing::{AdjustMethod, AdjustedPValues, ErrorRate, ErrorRateSpec, MonteCarlo};
