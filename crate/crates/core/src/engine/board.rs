use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::genome::{Movement, PieceType};

pub const BOARD_SIZE: i8 = 8;
pub const CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    /// Row delta of one step "forward", toward the opponent.
    pub fn forward(self) -> i8 {
        match self {
            Player::One => 1,
            Player::Two => -1,
        }
    }

    /// Row on which this player's pieces convert (the opponent's first row).
    pub fn last_row(self) -> i8 {
        match self {
            Player::One => BOARD_SIZE - 1,
            Player::Two => 0,
        }
    }
}

/// A board cell; index 0 is a1, 7 is h1, 63 is h8. Player One's home rows are 1-3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Cell(u8);

impl Cell {
    pub fn new(index: usize) -> Option<Cell> {
        (index < CELLS).then_some(Cell(index as u8))
    }

    pub fn from_coords(row: i8, col: i8) -> Option<Cell> {
        ((0..BOARD_SIZE).contains(&row) && (0..BOARD_SIZE).contains(&col))
            .then(|| Cell((row * BOARD_SIZE + col) as u8))
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn row(self) -> i8 {
        self.0 as i8 / BOARD_SIZE
    }

    pub fn col(self) -> i8 {
        self.0 as i8 % BOARD_SIZE
    }

    pub fn offset(self, dr: i8, dc: i8) -> Option<Cell> {
        Cell::from_coords(self.row() + dr, self.col() + dc)
    }

    /// The cell reached by rotating the board 180 degrees.
    pub fn rotated(self) -> Cell {
        Cell(63 - self.0)
    }

    pub fn chebyshev(self, other: Cell) -> u8 {
        let dr = (self.row() - other.row()).unsigned_abs();
        let dc = (self.col() - other.col()).unsigned_abs();
        dr.max(dc)
    }

    pub fn all() -> impl Iterator<Item = Cell> {
        (0..CELLS as u8).map(Cell)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.col() as u8) as char, self.row() + 1)
    }
}

impl FromStr for Cell {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.trim().as_bytes();
        if bytes.len() != 2 {
            return Err(format!("bad cell name '{s}'"));
        }
        let col = bytes[0].to_ascii_lowercase().wrapping_sub(b'a') as i8;
        let row = bytes[1].wrapping_sub(b'1') as i8;
        Cell::from_coords(row, col).ok_or_else(|| format!("bad cell name '{s}'"))
    }
}

impl TryFrom<String> for Cell {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Cell> for String {
    fn from(c: Cell) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub owner: Player,
    pub kind: PieceType,
    pub id: u16,
}

pub type Board = [Option<Piece>; CELLS];

const DIAG_FWD: &[(i8, i8)] = &[(1, -1), (1, 1)];
const DIAG_FWD_BACK: &[(i8, i8)] = &[(1, -1), (1, 1), (-1, -1), (-1, 1)];
const ALL_DIRS: &[(i8, i8)] = &[
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const KNIGHT: &[(i8, i8)] = &[
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
];
const STRAIGHT_FWD_BACK: &[(i8, i8)] = &[(1, 0), (-1, 0)];
const STRAIGHT_FWD: &[(i8, i8)] = &[(1, 0)];

/// Movement offsets as seen by player One; negate the row delta for player Two.
pub fn base_offsets(movement: Movement) -> &'static [(i8, i8)] {
    match movement {
        Movement::DiagFwd => DIAG_FWD,
        Movement::DiagFwdBack => DIAG_FWD_BACK,
        Movement::AllDirs => ALL_DIRS,
        Movement::LShape => KNIGHT,
        Movement::StraightFwdBack => STRAIGHT_FWD_BACK,
        Movement::StraightFwd => STRAIGHT_FWD,
    }
}

/// Size of a movement's direction set.
pub fn direction_count(movement: Movement) -> usize {
    base_offsets(movement).len()
}
