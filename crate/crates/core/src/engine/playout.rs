use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::board::Player;
use super::state::{EndReason, GameState};
use crate::agents::{Agent, AgentKind};
use crate::error::{EngineError, FormatError};
use crate::genome::{Chromosome, RuleSet};
use crate::seed::SimRng;

/// Lifetime summary of one piece: cells entered and plies alive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceLife {
    pub owner: Player,
    pub changes: u32,
    pub life: u32,
}

/// Everything the metrics need from one finished game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub chromosome: Chromosome,
    pub seed: u64,
    /// Agent kind per seat, player One first.
    pub agents: [AgentKind; 2],
    pub winner: Option<Player>,
    pub end: EndReason,
    pub plies: u32,
    pub pieces: Vec<PieceLife>,
    pub cells: Vec<u32>,
}

impl MatchRecord {
    /// Seat held by `kind`, if exactly one seat has it.
    pub fn seat_of(&self, kind: AgentKind) -> Option<Player> {
        match (self.agents[0] == kind, self.agents[1] == kind) {
            (true, false) => Some(Player::One),
            (false, true) => Some(Player::Two),
            _ => None,
        }
    }

    pub fn total_cells_entered(&self) -> u64 {
        self.cells.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn from_state(
        chromosome: Chromosome,
        seed: u64,
        agents: [AgentKind; 2],
        state: &GameState,
    ) -> Self {
        let end_ply = state.ply();
        let pieces = state
            .pieces()
            .iter()
            .map(|p| PieceLife {
                owner: p.owner,
                changes: p.cell_changes,
                life: p.death_ply.unwrap_or(end_ply) - p.birth_ply,
            })
            .collect();
        MatchRecord {
            chromosome,
            seed,
            agents,
            winner: state.status().winner(),
            end: state.status().reason().unwrap_or(EndReason::MoveCap),
            plies: end_ply,
            pieces,
            cells: state.cell_visits().to_vec(),
        }
    }
}

/// Plays one game from the initial setup until it ends.
pub fn playout(
    rules: &RuleSet,
    one: &dyn Agent,
    two: &dyn Agent,
    seed: u64,
    rng: &mut SimRng,
) -> Result<MatchRecord, EngineError> {
    let mut state = GameState::initial(rules);
    while !state.status().is_over() {
        let side = state.side_to_move();
        let agent = if side == Player::One { one } else { two };
        let legal = state.legal_moves(rules);
        let mv = agent.select(&state, rules, &legal, rng);
        if !legal.contains(&mv) {
            return Err(EngineError::AgentFault {
                player: side,
                ply: state.ply(),
                mv: mv.to_string(),
            });
        }
        state = state.apply_unchecked(rules, &mv);
    }
    Ok(MatchRecord::from_state(
        rules.encode(),
        seed,
        [one.kind(), two.kind()],
        &state,
    ))
}

/// One JSON object per line.
pub fn write_records<W: Write>(mut out: W, records: &[MatchRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<MatchRecord>, FormatError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| FormatError::Line {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| FormatError::Line {
            line: i + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
