//! Rule interpreter: setup, move generation, move application, statistics and
//! terminal detection.

mod board;
mod movegen;
mod playout;
mod state;

pub use board::{base_offsets, direction_count, Board, Cell, Piece, Player, BOARD_SIZE, CELLS};
pub use movegen::{generate as legal_moves_for, Move};
pub use playout::{playout, read_records, write_records, MatchRecord, PieceLife};
pub use state::{EndReason, GameState, PieceStats, Status, MAX_PLIES};
