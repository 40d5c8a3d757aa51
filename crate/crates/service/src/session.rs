use boardforge::agents::{Agent, AgentKind, MinimaxAgent, RandomAgent};
use boardforge::engine::{Cell, GameState, Move, Player, Status};
use boardforge::genome::{Capture, RuleSet, StepSize};
use boardforge::seed::SimRng;
use serde::Serialize;
use tokio::sync::broadcast;

use crate::error::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Human,
    Agent,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryEntry {
    pub ply: u32,
    pub player: Player,
    pub actor: Actor,
    #[serde(rename = "move")]
    pub mv: Move,
    pub notation: String,
}

pub struct Session {
    pub id: u64,
    pub game_id: String,
    pub rules: RuleSet,
    pub human: Player,
    pub opponent: AgentKind,
    pub run_index: u8,
    pub state: GameState,
    pub history: Vec<HistoryEntry>,
    rng: SimRng,
    pub events: broadcast::Sender<String>,
}

pub fn opponent_agent(kind: AgentKind) -> Result<Box<dyn Agent + Send>, ApiError> {
    match kind {
        AgentKind::Random => Ok(Box::new(RandomAgent)),
        AgentKind::Minimax => Ok(Box::new(MinimaxAgent::default())),
        AgentKind::Ann => Err(ApiError::BadRequest(
            "opponent must be random or minimax".into(),
        )),
    }
}

impl Session {
    pub fn new(
        id: u64,
        game_id: String,
        rules: RuleSet,
        human: Player,
        opponent: AgentKind,
        run_index: u8,
        rng: SimRng,
    ) -> Session {
        let state = GameState::initial(&rules);
        let (events, _) = broadcast::channel(64);
        Session {
            id,
            game_id,
            rules,
            human,
            opponent,
            run_index,
            state,
            history: Vec::new(),
            rng,
            events,
        }
    }

    pub fn human_to_move(&self) -> bool {
        !self.state.status().is_over() && self.state.side_to_move() == self.human
    }

    /// Legal moves for the side to move, optionally only those starting at `from`.
    pub fn moves_from(&self, from: Option<Cell>) -> Vec<Move> {
        if self.state.status().is_over() {
            return Vec::new();
        }
        let mut moves = self.state.legal_moves(&self.rules);
        if let Some(f) = from {
            moves.retain(|m| m.from == f);
        }
        moves
    }

    fn push(&mut self, mv: Move, actor: Actor) {
        let player = self.state.side_to_move();
        self.state = self.state.apply_unchecked(&self.rules, &mv);
        self.history.push(HistoryEntry {
            ply: self.state.ply(),
            player,
            actor,
            notation: mv.to_string(),
            mv,
        });
    }

    /// Plays the agent's move if it is the agent's turn.
    pub fn agent_reply(&mut self) -> Result<Option<Move>, ApiError> {
        if self.state.status().is_over() || self.state.side_to_move() == self.human {
            return Ok(None);
        }
        let legal = self.state.legal_moves(&self.rules);
        let mv =
            opponent_agent(self.opponent)?.select(&self.state, &self.rules, &legal, &mut self.rng);
        self.push(mv.clone(), Actor::Agent);
        Ok(Some(mv))
    }

    /// Finds the unique legal move matching the request; nothing changes on error.
    pub fn resolve(&self, from: Cell, to: Cell, chain: Option<&[Cell]>) -> Result<Move, ApiError> {
        if self.state.status().is_over() {
            return Err(ApiError::Conflict("game is over".into()));
        }
        if !self.human_to_move() {
            return Err(ApiError::Conflict("not your turn".into()));
        }
        let legal = self.state.legal_moves(&self.rules);
        let matching: Vec<&Move> = legal
            .iter()
            .filter(|m| m.from == from && m.to == to)
            .filter(|m| chain.is_none_or(|c| m.path == c))
            .collect();
        match matching.as_slice() {
            [one] => Ok((*one).clone()),
            [] => {
                let mut alternatives: Vec<Move> =
                    legal.iter().filter(|m| m.from == from).cloned().collect();
                if alternatives.is_empty() {
                    alternatives = legal.clone();
                }
                Err(ApiError::Rejected {
                    reason: format!("illegal move {from}-{to}"),
                    alternatives,
                })
            }
            many => Err(ApiError::Rejected {
                reason: format!("{from}-{to} is ambiguous; give chainPath"),
                alternatives: many.iter().map(|m| (*m).clone()).collect(),
            }),
        }
    }

    pub fn play_human(&mut self, mv: Move) {
        self.push(mv, Actor::Human);
    }

    /// Replays the recorded history from the initial position.
    pub fn replay(&self) -> Result<GameState, ApiError> {
        let mut s = GameState::initial(&self.rules);
        for h in &self.history {
            s = s
                .apply_move(&self.rules, &h.mv)
                .map_err(|e| ApiError::Internal(e.to_string()))?;
        }
        Ok(s)
    }

    pub fn status(&self) -> Status {
        self.state.status()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PieceSummary {
    #[serde(rename = "type")]
    pub kind: u8,
    pub movement: &'static str,
    pub step: &'static str,
    pub capture: &'static str,
    pub converts_to: Option<u8>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RulesSummary {
    pub pieces: Vec<PieceSummary>,
    pub piece_of_honor: Option<u8>,
    pub mandatory_capture: bool,
    pub pieces_per_player: usize,
}

pub fn summarize(rules: &RuleSet) -> RulesSummary {
    let pieces = rules
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| PieceSummary {
            kind: i as u8 + 1,
            movement: p.movement.label(),
            step: match p.step {
                StepSize::Single => "single",
                StepSize::Multiple => "multiple",
            },
            capture: match p.capture {
                Capture::StepInto => "step-into",
                Capture::StepOver => "step-over",
            },
            converts_to: p.conversion.map(|t| t.id()),
        })
        .collect();
    RulesSummary {
        pieces,
        piece_of_honor: rules.piece_of_honor.map(|t| t.id()),
        mandatory_capture: rules.mandatory_capture,
        pieces_per_player: rules.pieces_per_player(),
    }
}
