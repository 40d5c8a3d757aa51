use thiserror::Error;

use crate::engine::Player;
use crate::genome::Violation;

#[derive(Debug, Error)]
pub enum GenomeError {
    #[error("invalid chromosome: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("malformed chromosome line: {0}")]
    Parse(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("illegal move {mv}: not in the legal move set")]
    IllegalMove { mv: String },
    #[error("game is already over")]
    GameOver,
    #[error("agent for {player:?} returned an illegal move at ply {ply}: {mv}")]
    AgentFault {
        player: Player,
        ply: u32,
        mv: String,
    },
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty batch of match records")]
    EmptyBatch,
    #[error("duel record does not say which seat the min-max agent held")]
    UntaggedRecord,
    #[error("raw duration {0} outside [0, 100]")]
    DurationOutOfRange(f64),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Genome(#[from] GenomeError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error(transparent)]
    Genome(#[from] GenomeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
