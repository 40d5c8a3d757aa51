//! The three evolved reference games and the unevolved random game, shipped as
//! chromosome files under `fixtures/`.
//!
//! Rule tables (movement, step, capture, conversion, honor, mandatory capture)
//! follow the published rule sheets. The starting layouts were not published
//! in machine-readable form, so the placement templates here are our own.

use crate::genome::{Chromosome, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    Game1,
    Game2,
    Game3,
    Random,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [
        Fixture::Game1,
        Fixture::Game2,
        Fixture::Game3,
        Fixture::Random,
    ];
    pub const EVOLVED: [Fixture; 3] = [Fixture::Game1, Fixture::Game2, Fixture::Game3];

    pub fn id(self) -> &'static str {
        match self {
            Fixture::Game1 => "game1",
            Fixture::Game2 => "game2",
            Fixture::Game3 => "game3",
            Fixture::Random => "random",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Fixture::Game1 => "Game 1 (evolved)",
            Fixture::Game2 => "Game 2 (evolved)",
            Fixture::Game3 => "Game 3 (evolved)",
            Fixture::Random => "Game 4 (random)",
        }
    }

    pub fn from_id(id: &str) -> Option<Fixture> {
        Fixture::ALL.into_iter().find(|f| f.id() == id)
    }

    pub fn text(self) -> &'static str {
        match self {
            Fixture::Game1 => include_str!("../fixtures/game1.chromosome"),
            Fixture::Game2 => include_str!("../fixtures/game2.chromosome"),
            Fixture::Game3 => include_str!("../fixtures/game3.chromosome"),
            Fixture::Random => include_str!("../fixtures/random.chromosome"),
        }
    }

    pub fn chromosome(self) -> Chromosome {
        self.text().parse().expect("fixture chromosome parses")
    }

    pub fn rules(self) -> RuleSet {
        self.chromosome()
            .decode()
            .expect("fixture chromosome is valid")
    }
}
