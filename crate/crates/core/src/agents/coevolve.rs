//! Coevolutionary training of network controllers, used to measure how long a
//! game takes to learn.
//!
//! Each iteration every individual meets a handful of randomly drawn opponents,
//! two games per meeting with colors swapped, scoring +1 / 0 / -2 for a
//! win / draw / loss. The top half survives and each survivor spawns one
//! Gaussian-mutated offspring. After scoring, the best individual plays every
//! other member of the population; the learning duration is the first
//! iteration in which it beats all of them.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ann::{AnnAgent, AnnController};
use crate::engine::{playout, Player};
use crate::genome::RuleSet;
use crate::seed::{derived_rng, rng_for};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoevolutionConfig {
    pub population: usize,
    pub opponents: usize,
    pub sigma: f64,
    /// Initial weights are uniform in `[-init_range, init_range]`.
    pub init_range: f64,
    pub max_iterations: u32,
    pub seed: u64,
}

impl Default for CoevolutionConfig {
    fn default() -> Self {
        CoevolutionConfig {
            population: 20,
            opponents: 5,
            sigma: 0.1,
            init_range: 0.2,
            max_iterations: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u32,
    pub best_score: i32,
    pub mean_score: f64,
    /// Opponents the best individual beat in the round robin.
    pub round_robin_wins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoevolutionOutcome {
    /// Iteration at which a dominant individual appeared, or the cap.
    pub iterations: u32,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

/// Winner of one game between two networks, `first` playing as player One.
pub fn duel(rules: &RuleSet, first: &AnnController, second: &AnnController) -> Option<Player> {
    // Network play is deterministic; the random source is never consulted.
    let mut rng = rng_for(0);
    playout(
        rules,
        &AnnAgent { net: first },
        &AnnAgent { net: second },
        0,
        &mut rng,
    )
    .expect("network agents only pick legal moves")
    .winner
}

const WIN: i32 = 1;
const DRAW: i32 = 0;
const LOSS: i32 = -2;

/// Outcome of a two-game meeting, from `a`'s side: (games a won, games b won).
type Meeting = (u8, u8);

fn meet(rules: &RuleSet, a: &AnnController, b: &AnnController) -> Meeting {
    let mut wins = (0, 0);
    match duel(rules, a, b) {
        Some(Player::One) => wins.0 += 1,
        Some(Player::Two) => wins.1 += 1,
        None => {}
    }
    match duel(rules, b, a) {
        Some(Player::One) => wins.1 += 1,
        Some(Player::Two) => wins.0 += 1,
        None => {}
    }
    wins
}

fn score(m: Meeting) -> i32 {
    let draws = 2 - i32::from(m.0) - i32::from(m.1);
    i32::from(m.0) * WIN + draws * DRAW + i32::from(m.1) * LOSS
}

/// Runs coevolution on `rules` until some individual beats the whole
/// population or `max_iterations` is reached. `initial` replaces the random
/// starting population when given.
pub fn coevolve_learnability(
    rules: &RuleSet,
    config: &CoevolutionConfig,
    initial: Option<Vec<AnnController>>,
) -> CoevolutionOutcome {
    let mut population = initial.unwrap_or_else(|| {
        let mut rng = derived_rng(config.seed, "coevolve/init");
        (0..config.population.max(2))
            .map(|_| AnnController::random(config.init_range, &mut rng))
            .collect()
    });
    let size = population.len();
    assert!(size >= 2, "coevolution needs at least two individuals");
    let mut trace = Vec::new();

    for iteration in 1..=config.max_iterations {
        let mut rng = derived_rng(config.seed, &format!("coevolve/iter/{iteration}"));
        let pairings: Vec<(usize, usize)> = (0..size)
            .flat_map(|i| {
                draw_opponents(i, size, config.opponents, &mut rng)
                    .into_iter()
                    .map(move |j| (i, j))
            })
            .collect();

        let mut wanted: Vec<(usize, usize)> = pairings.iter().map(|&(i, j)| key(i, j)).collect();
        wanted.sort_unstable();
        wanted.dedup();
        let mut meetings: HashMap<(usize, usize), Meeting> = play_all(rules, &population, &wanted);

        let mut scores = vec![0i32; size];
        for &(i, j) in &pairings {
            scores[i] += score(oriented(&meetings, i, j));
        }
        let mut ranked: Vec<usize> = (0..size).collect();
        ranked.sort_by_key(|&i| std::cmp::Reverse(scores[i]));
        let best = ranked[0];

        let missing: Vec<(usize, usize)> = (0..size)
            .filter(|&j| j != best)
            .map(|j| key(best, j))
            .filter(|k| !meetings.contains_key(k))
            .collect();
        meetings.extend(play_all(rules, &population, &missing));
        let round_robin_wins = (0..size)
            .filter(|&j| j != best)
            .filter(|&j| {
                let (won, lost) = oriented(&meetings, best, j);
                won > lost
            })
            .count();

        trace.push(IterationRecord {
            iteration,
            best_score: scores[best],
            mean_score: f64::from(scores.iter().sum::<i32>()) / size as f64,
            round_robin_wins,
        });
        if round_robin_wins == size - 1 {
            return CoevolutionOutcome {
                iterations: iteration,
                converged: true,
                trace,
            };
        }

        let survivors = size.div_ceil(2);
        let mut next: Vec<AnnController> = ranked[..survivors]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        let mut k = 0;
        while next.len() < size {
            next.push(population[ranked[k % survivors]].mutated(config.sigma, &mut rng));
            k += 1;
        }
        population = next;
    }
    CoevolutionOutcome {
        iterations: config.max_iterations,
        converged: false,
        trace,
    }
}

fn draw_opponents<R: Rng>(me: usize, size: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let others = size - 1;
    let pick = |r: usize| if r >= me { r + 1 } else { r };
    if count <= others {
        sample(rng, others, count).into_iter().map(pick).collect()
    } else {
        (0..count).map(|_| pick(rng.gen_range(0..others))).collect()
    }
}

fn key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

fn oriented(meetings: &HashMap<(usize, usize), Meeting>, i: usize, j: usize) -> Meeting {
    let m = meetings[&key(i, j)];
    if i < j {
        m
    } else {
        (m.1, m.0)
    }
}

fn play_all(
    rules: &RuleSet,
    population: &[AnnController],
    pairs: &[(usize, usize)],
) -> HashMap<(usize, usize), Meeting> {
    pairs
        .par_iter()
        .map(|&(i, j)| ((i, j), meet(rules, &population[i], &population[j])))
        .collect()
}
