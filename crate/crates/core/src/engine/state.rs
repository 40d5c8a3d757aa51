use serde::{Deserialize, Serialize};

use super::board::{Board, Cell, Piece, Player, CELLS};
use super::movegen::{self, Move};
use crate::error::EngineError;
use crate::genome::{PieceType, RuleSet, PLACEMENT_CELLS};

/// Hard cap on the number of plies in a game.
pub const MAX_PLIES: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndReason {
    HonorLost,
    NoLegalMove,
    MoveCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Ongoing,
    Won { winner: Player, reason: EndReason },
    Draw { reason: EndReason },
}

impl Status {
    pub fn is_over(self) -> bool {
        self != Status::Ongoing
    }

    pub fn winner(self) -> Option<Player> {
        match self {
            Status::Won { winner, .. } => Some(winner),
            _ => None,
        }
    }

    pub fn reason(self) -> Option<EndReason> {
        match self {
            Status::Ongoing => None,
            Status::Won { reason, .. } | Status::Draw { reason } => Some(reason),
        }
    }
}

/// Per-piece accumulator: cells entered, and when the piece was born and died.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PieceStats {
    pub owner: Player,
    pub cell_changes: u32,
    pub birth_ply: u32,
    pub death_ply: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    board: Board,
    side_to_move: Player,
    ply: u32,
    /// Indexed by piece id.
    pieces: Vec<PieceStats>,
    cell_visits: [u32; CELLS],
    status: Status,
    honor_at_start: [bool; 2],
}

impl GameState {
    /// Player One fills rows 1-3 from the template; player Two gets the
    /// 180-degree rotation of the same template on rows 6-8. One moves first.
    pub fn initial(rules: &RuleSet) -> GameState {
        let mut board: Board = [None; CELLS];
        for player in Player::BOTH {
            for (k, kind) in rules.placement.iter().enumerate().take(PLACEMENT_CELLS) {
                let Some(kind) = *kind else { continue };
                let cell = Cell::new(k).expect("template cell");
                let cell = if player == Player::One {
                    cell
                } else {
                    cell.rotated()
                };
                board[cell.index()] = Some(Piece {
                    owner: player,
                    kind,
                    id: 0,
                });
            }
        }
        GameState::from_board(board, Player::One, 0, rules)
    }

    /// Arbitrary position; piece ids are reassigned in cell order and the
    /// given board counts as the starting setup for the honor rule.
    pub fn from_board(
        mut board: Board,
        side_to_move: Player,
        ply: u32,
        rules: &RuleSet,
    ) -> GameState {
        let mut pieces = Vec::new();
        for p in board.iter_mut().flatten() {
            p.id = pieces.len() as u16;
            pieces.push(PieceStats {
                owner: p.owner,
                cell_changes: 0,
                birth_ply: ply,
                death_ply: None,
            });
        }
        let honor_at_start = match rules.piece_of_honor {
            Some(h) => Player::BOTH.map(|pl| count_kind(&board, pl, h) > 0),
            None => [false; 2],
        };
        let mut state = GameState {
            board,
            side_to_move,
            ply: ply.min(MAX_PLIES),
            pieces,
            cell_visits: [0; CELLS],
            status: Status::Ongoing,
            honor_at_start,
        };
        state.status = state.compute_status(rules);
        state
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn at(&self, cell: Cell) -> Option<Piece> {
        self.board[cell.index()]
    }

    pub fn side_to_move(&self) -> Player {
        self.side_to_move
    }

    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn pieces(&self) -> &[PieceStats] {
        &self.pieces
    }

    pub fn cell_visits(&self) -> &[u32; CELLS] {
        &self.cell_visits
    }

    pub fn piece_count(&self, player: Player) -> usize {
        self.board
            .iter()
            .flatten()
            .filter(|p| p.owner == player)
            .count()
    }

    pub fn legal_moves(&self, rules: &RuleSet) -> Vec<Move> {
        movegen::generate(&self.board, rules, self.side_to_move)
    }

    /// Applies `mv` after checking it is one of the current legal moves.
    pub fn apply_move(&self, rules: &RuleSet, mv: &Move) -> Result<GameState, EngineError> {
        if self.status.is_over() {
            return Err(EngineError::GameOver);
        }
        if !self.legal_moves(rules).contains(mv) {
            return Err(EngineError::IllegalMove { mv: mv.to_string() });
        }
        Ok(self.apply_unchecked(rules, mv))
    }

    /// Applies a move already known to be legal.
    pub fn apply_unchecked(&self, rules: &RuleSet, mv: &Move) -> GameState {
        let mut next = self.clone();
        let ply = self.ply + 1;
        let mut mover = next.board[mv.from.index()]
            .take()
            .expect("mover on from cell");
        for victim in &mv.captures {
            if let Some(dead) = next.board[victim.index()].take() {
                next.pieces[usize::from(dead.id)].death_ply = Some(ply);
            }
        }
        if let Some(kind) = mv.converts_to {
            mover.kind = kind;
        }
        next.board[mv.to.index()] = Some(mover);
        next.pieces[usize::from(mover.id)].cell_changes += mv.path.len() as u32;
        for cell in &mv.path {
            next.cell_visits[cell.index()] += 1;
        }
        next.ply = ply;
        next.side_to_move = self.side_to_move.opponent();
        next.status = next.compute_status(rules);
        next
    }

    /// Board after `mv`, without statistics or status bookkeeping. Used by search.
    pub fn board_after(&self, mv: &Move) -> Board {
        let mut board = self.board;
        let mut mover = board[mv.from.index()].take().expect("mover on from cell");
        for victim in &mv.captures {
            board[victim.index()] = None;
        }
        if let Some(kind) = mv.converts_to {
            mover.kind = kind;
        }
        board[mv.to.index()] = Some(mover);
        board
    }

    /// Terminal test, in priority order: honor piece lost, side to move
    /// stuck, move cap reached (more pieces wins, equal is a draw).
    fn compute_status(&self, rules: &RuleSet) -> Status {
        if let Some(honor) = rules.piece_of_honor {
            for player in [self.side_to_move, self.side_to_move.opponent()] {
                if self.honor_at_start[player.index()]
                    && count_kind(&self.board, player, honor) == 0
                {
                    return Status::Won {
                        winner: player.opponent(),
                        reason: EndReason::HonorLost,
                    };
                }
            }
        }
        if !movegen::has_any(&self.board, rules, self.side_to_move) {
            return Status::Won {
                winner: self.side_to_move.opponent(),
                reason: EndReason::NoLegalMove,
            };
        }
        if self.ply >= MAX_PLIES {
            let one = self.piece_count(Player::One);
            let two = self.piece_count(Player::Two);
            return match one.cmp(&two) {
                std::cmp::Ordering::Greater => Status::Won {
                    winner: Player::One,
                    reason: EndReason::MoveCap,
                },
                std::cmp::Ordering::Less => Status::Won {
                    winner: Player::Two,
                    reason: EndReason::MoveCap,
                },
                std::cmp::Ordering::Equal => Status::Draw {
                    reason: EndReason::MoveCap,
                },
            };
        }
        Status::Ongoing
    }
}

fn count_kind(board: &Board, player: Player, kind: PieceType) -> usize {
    board
        .iter()
        .flatten()
        .filter(|p| p.owner == player && p.kind == kind)
        .count()
}
