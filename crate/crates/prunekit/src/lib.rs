//! Instance selection for text classification: TF-IDF ingestion, exact
//! sparse-cosine KNN, classical editing/condensation baselines, and
//! confidence-based redundancy/noise removal, with a benchmark harness
//! that measures reduction, effectiveness and speedup together.
//!
//! Start with the `examples/` directory: each file exercises one
//! capability end to end on a small synthetic corpus.

pub mod bio;
pub mod classic;
pub mod cli;
pub mod corpus;
pub mod e2sc;
pub mod error;
pub mod eval;
pub mod methods;
pub mod neighbors;
pub mod posterior;
pub mod sampling;
pub mod selection;
pub mod stats;
pub mod synth;
pub mod weak;

pub use error::{Error, Result};
