//! Legal move generation.
//!
//! Semantics, for a piece of player P:
//!
//! * Directions are the movement's offsets with "forward" meaning toward the
//!   opponent, so player Two uses the row-mirrored set.
//! * Single step: one cell along a direction. Multiple step: a slide along the
//!   ray that stops at the first occupied cell.
//! * Step-into capture lands on the first opponent piece reached.
//! * Step-over capture jumps the first opponent piece reached to the empty cell
//!   right behind it. After landing, further jumps by the same piece are
//!   mandatory; every maximal chain is one [`Move`]. Jumped pieces leave the
//!   board as they are jumped.
//! * L-shaped movers use the eight knight targets and ignore the step size.
//!   Step-into captures at the target; step-over requires an empty target and
//!   kills every opponent piece on the long leg, chaining like other jumps.
//! * With mandatory capture on, quiet moves are dropped whenever a capture exists.

use serde::{Deserialize, Serialize};

use super::board::{base_offsets, Board, Cell, Piece, Player};
use crate::genome::{Capture, Movement, PieceRules, PieceType, RuleSet, StepSize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub from: Cell,
    pub to: Cell,
    /// Every cell the piece enters, in order; the last entry is `to`.
    pub path: Vec<Cell>,
    /// Cells whose (opponent) pieces die.
    pub captures: Vec<Cell>,
    #[serde(rename = "convertsTo")]
    pub converts_to: Option<PieceType>,
}

impl Move {
    pub fn is_capture(&self) -> bool {
        !self.captures.is_empty()
    }
}

impl std::fmt::Display for Move {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.from)?;
        for c in &self.path {
            let sep = if self.captures.is_empty() { '-' } else { 'x' };
            write!(f, "{sep}{c}")?;
        }
        if let Some(t) = self.converts_to {
            write!(f, "={t}")?;
        }
        Ok(())
    }
}

/// All legal moves for `side` on `board`.
pub fn generate(board: &Board, rules: &RuleSet, side: Player) -> Vec<Move> {
    let mut moves = Vec::with_capacity(32);
    for from in Cell::all() {
        if let Some(piece) = board[from.index()] {
            if piece.owner == side {
                piece_moves(board, rules, from, piece, &mut moves);
            }
        }
    }
    if rules.mandatory_capture && moves.iter().any(Move::is_capture) {
        moves.retain(Move::is_capture);
    }
    moves
}

/// Whether `side` has at least one legal move.
pub fn has_any(board: &Board, rules: &RuleSet, side: Player) -> bool {
    let mut scratch = Vec::new();
    for from in Cell::all() {
        if let Some(piece) = board[from.index()] {
            if piece.owner == side {
                piece_moves(board, rules, from, piece, &mut scratch);
                if !scratch.is_empty() {
                    return true;
                }
            }
        }
    }
    false
}

fn offsets(movement: Movement, owner: Player) -> impl Iterator<Item = (i8, i8)> {
    let fwd = owner.forward();
    base_offsets(movement)
        .iter()
        .map(move |&(dr, dc)| (dr * fwd, dc))
}

fn is_opponent(board: &Board, cell: Cell, side: Player) -> bool {
    matches!(board[cell.index()], Some(p) if p.owner != side)
}

fn conversion(rules: &PieceRules, owner: Player, to: Cell) -> Option<PieceType> {
    if to.row() == owner.last_row() {
        rules.conversion
    } else {
        None
    }
}

fn piece_moves(board: &Board, rules: &RuleSet, from: Cell, piece: Piece, out: &mut Vec<Move>) {
    let pr = rules.piece(piece.kind);
    let side = piece.owner;
    let emit = |out: &mut Vec<Move>, path: Vec<Cell>, captures: Vec<Cell>| {
        let to = *path.last().expect("non-empty path");
        out.push(Move {
            from,
            to,
            path,
            captures,
            converts_to: conversion(pr, side, to),
        });
    };

    // Quiet moves and step-into captures.
    for (dr, dc) in offsets(pr.movement, side) {
        if pr.movement == Movement::LShape {
            let Some(target) = from.offset(dr, dc) else {
                continue;
            };
            match board[target.index()] {
                None => {
                    // A step-over L onto an empty cell kills whatever it passes; that is a jump.
                    if pr.capture == Capture::StepInto
                        || long_leg_victims(board, from, dr, dc, side).is_empty()
                    {
                        emit(out, vec![target], vec![]);
                    }
                }
                Some(q) if q.owner != side && pr.capture == Capture::StepInto => {
                    emit(out, vec![target], vec![target])
                }
                _ => {}
            }
            continue;
        }
        let mut path = Vec::new();
        let mut cur = from;
        while let Some(next) = cur.offset(dr, dc) {
            match board[next.index()] {
                None => {
                    path.push(next);
                    emit(out, path.clone(), vec![]);
                }
                Some(q) => {
                    if q.owner != side && pr.capture == Capture::StepInto {
                        path.push(next);
                        emit(out, path, vec![next]);
                    }
                    break;
                }
            }
            if pr.step == StepSize::Single {
                break;
            }
            cur = next;
        }
    }

    if pr.capture == Capture::StepOver {
        let mut scratch = *board;
        scratch[from.index()] = None;
        let mut chains = Vec::new();
        extend_chain(
            &mut scratch,
            pr,
            piece,
            from,
            &mut Vec::new(),
            &mut Vec::new(),
            &mut chains,
        );
        for (path, captures) in chains {
            emit(out, path, captures);
        }
    }
}

/// Opponent pieces on the two long-leg cells of the L move `(dr, dc)` from `at`.
fn long_leg_victims(board: &Board, at: Cell, dr: i8, dc: i8, side: Player) -> Vec<Cell> {
    let leg: [(i8, i8); 2] = if dr.abs() == 2 {
        [(dr.signum(), 0), (dr, 0)]
    } else {
        [(0, dc.signum()), (0, dc)]
    };
    leg.iter()
        .filter_map(|&(r, c)| at.offset(r, c))
        .filter(|&c| is_opponent(board, c, side))
        .collect()
}

/// One jump available from `at`: the cells entered and the pieces killed.
fn jumps_from(
    board: &Board,
    pr: &PieceRules,
    side: Player,
    at: Cell,
) -> Vec<(Vec<Cell>, Vec<Cell>)> {
    let mut found = Vec::new();
    for (dr, dc) in offsets(pr.movement, side) {
        if pr.movement == Movement::LShape {
            let Some(target) = at.offset(dr, dc) else {
                continue;
            };
            if board[target.index()].is_some() {
                continue;
            }
            let victims = long_leg_victims(board, at, dr, dc, side);
            if !victims.is_empty() {
                found.push((vec![target], victims));
            }
            continue;
        }
        let mut slide = Vec::new();
        let mut cur = at;
        while let Some(next) = cur.offset(dr, dc) {
            match board[next.index()] {
                None => {
                    if pr.step == StepSize::Single {
                        break;
                    }
                    slide.push(next);
                    cur = next;
                }
                Some(q) => {
                    if q.owner != side {
                        if let Some(landing) = next.offset(dr, dc) {
                            if board[landing.index()].is_none() {
                                slide.push(landing);
                                found.push((slide, vec![next]));
                            }
                        }
                    }
                    break;
                }
            }
        }
    }
    found
}

/// Depth-first enumeration of maximal jump chains. `board` has the mover lifted off.
fn extend_chain(
    board: &mut Board,
    pr: &PieceRules,
    piece: Piece,
    at: Cell,
    path: &mut Vec<Cell>,
    captures: &mut Vec<Cell>,
    out: &mut Vec<(Vec<Cell>, Vec<Cell>)>,
) {
    let jumps = jumps_from(board, pr, piece.owner, at);
    if jumps.is_empty() {
        if !captures.is_empty() {
            out.push((path.clone(), captures.clone()));
        }
        return;
    }
    for (segment, victims) in jumps {
        let landing = *segment.last().expect("jump lands somewhere");
        let removed: Vec<Option<Piece>> = victims.iter().map(|v| board[v.index()].take()).collect();
        let (path_len, cap_len) = (path.len(), captures.len());
        path.extend_from_slice(&segment);
        captures.extend_from_slice(&victims);
        extend_chain(board, pr, piece, landing, path, captures, out);
        path.truncate(path_len);
        captures.truncate(cap_len);
        for (v, p) in victims.iter().zip(removed) {
            board[v.index()] = p;
        }
    }
}
