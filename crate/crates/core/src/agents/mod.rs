//! Game-playing controllers: random, one-ply min-max with a rule-based
//! evaluation, and the neural-network controller trained by coevolution.

mod ann;
mod coevolve;
mod minimax;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::engine::{GameState, Move};
use crate::genome::RuleSet;
use crate::seed::SimRng;

pub use ann::{AnnAgent, AnnController, ANN_LAYERS, WEIGHT_LIMIT};
pub use coevolve::{
    coevolve_learnability, duel, CoevolutionConfig, CoevolutionOutcome, IterationRecord,
};
pub use minimax::{evaluate_board, EvaluationWeights, MinimaxAgent, HONOR_BONUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Random,
    Minimax,
    Ann,
}

impl std::str::FromStr for AgentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "random" => Ok(AgentKind::Random),
            "minimax" => Ok(AgentKind::Minimax),
            "ann" => Ok(AgentKind::Ann),
            other => Err(format!(
                "unknown agent '{other}' (expected random or minimax)"
            )),
        }
    }
}

impl std::fmt::Display for AgentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AgentKind::Random => "random",
            AgentKind::Minimax => "minimax",
            AgentKind::Ann => "ann",
        })
    }
}

/// A controller picks one of the legal moves. `legal` is never empty.
pub trait Agent: Sync {
    fn kind(&self) -> AgentKind;

    fn select(&self, state: &GameState, rules: &RuleSet, legal: &[Move], rng: &mut SimRng) -> Move;
}

/// Shuffles the legal moves into a queue and takes the head, preferring the
/// first capture in the queue when captures are mandatory.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomAgent;

impl Agent for RandomAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Random
    }

    fn select(
        &self,
        _state: &GameState,
        rules: &RuleSet,
        legal: &[Move],
        rng: &mut SimRng,
    ) -> Move {
        assert!(!legal.is_empty(), "random agent called without legal moves");
        let mut queue: Vec<&Move> = legal.iter().collect();
        queue.shuffle(rng);
        if rules.mandatory_capture {
            if let Some(capture) = queue.iter().find(|m| m.is_capture()) {
                return (*capture).clone();
            }
        }
        queue[0].clone()
    }
}
