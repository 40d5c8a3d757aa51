//! Evolutionary search for two-player board games in a generalized
//! chess/checkers rule space.
//!
//! A 50-gene [`genome::Chromosome`] encodes a complete game. The
//! [`engine`] interprets the decoded [`genome::RuleSet`], the [`agents`] play
//! it, [`metrics`] turns batches of playouts into four entertainment scores,
//! and [`evolve`] runs a 1+1 evolution strategy per family with an archive of
//! the best games per metric. [`analysis`] covers diversity selection,
//! learnability and survey statistics.

pub mod agents;
pub mod analysis;
pub mod engine;
pub mod error;
pub mod evolve;
pub mod fixtures;
pub mod genome;
pub mod metrics;
pub mod seed;

pub use error::{EngineError, FormatError, GenomeError, MetricsError};
