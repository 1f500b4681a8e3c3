//! Unseeded matching of two networks drawn from the same Lipschitz graphon.
//!
//! Start with [`matcher::match_graphs`]; the `examples/` directory has a
//! runnable program for each stage of the pipeline.

pub mod assignment;
pub mod error;
pub mod evaluation;
pub mod graphon_model;
pub mod harness;
pub mod matcher;
pub mod permutation;
pub mod rng;
pub mod selftest;
pub mod smoothing;
pub mod wasserstein;

pub use error::{Error, Result};
pub use graphon_model::{AdjacencyMatrix, Graphon, ProbabilityMatrix};
pub use matcher::{match_graphs, MatchResult, MatcherConfig};
pub use permutation::Permutation;
