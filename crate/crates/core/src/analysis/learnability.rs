//! Learnability comparison across games: coevolution runs per game and seed,
//! summarized by the median iteration count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{coevolve_learnability, CoevolutionConfig};
use crate::genome::RuleSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnabilityConfig {
    pub coevolution: CoevolutionConfig,
    /// One coevolution run per seed; the run's `seed` field is replaced.
    pub seeds: Vec<u64>,
}

impl Default for LearnabilityConfig {
    fn default() -> Self {
        LearnabilityConfig {
            coevolution: CoevolutionConfig::default(),
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnabilityRun {
    pub seed: u64,
    pub iterations: u32,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLearnability {
    pub game_id: String,
    pub runs: Vec<LearnabilityRun>,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnabilityReport {
    pub games: Vec<GameLearnability>,
    pub baseline: Option<String>,
    /// `(game id, baseline median < game median)` for every non-baseline game.
    pub ordinal: Vec<(String, bool)>,
}

pub fn median(values: &[u32]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => f64::from(v[n / 2]),
        n => (f64::from(v[n / 2 - 1]) + f64::from(v[n / 2])) / 2.0,
    }
}

/// Runs every (game, seed) pair in parallel with the same coevolution
/// settings. `baseline` names the game the others are compared against.
pub fn learnability_experiment(
    games: &[(String, RuleSet)],
    config: &LearnabilityConfig,
    baseline: Option<&str>,
) -> LearnabilityReport {
    let jobs: Vec<(usize, u64)> = (0..games.len())
        .flat_map(|g| config.seeds.iter().map(move |&s| (g, s)))
        .collect();
    let outcomes: Vec<LearnabilityRun> = jobs
        .par_iter()
        .map(|&(g, seed)| {
            let coevolution = CoevolutionConfig {
                seed,
                ..config.coevolution
            };
            let out = coevolve_learnability(&games[g].1, &coevolution, None);
            LearnabilityRun {
                seed,
                iterations: out.iterations,
                converged: out.converged,
            }
        })
        .collect();

    let per_game: Vec<GameLearnability> = games
        .iter()
        .enumerate()
        .map(|(g, (id, _))| {
            let runs: Vec<LearnabilityRun> = jobs
                .iter()
                .zip(&outcomes)
                .filter(|((gi, _), _)| *gi == g)
                .map(|(_, r)| r.clone())
                .collect();
            let iterations: Vec<u32> = runs.iter().map(|r| r.iterations).collect();
            GameLearnability {
                game_id: id.clone(),
                median: median(&iterations),
                runs,
            }
        })
        .collect();

    let ordinal = match baseline.and_then(|b| per_game.iter().find(|g| g.game_id == b)) {
        Some(base) => per_game
            .iter()
            .filter(|g| g.game_id != base.game_id)
            .map(|g| (g.game_id.clone(), base.median < g.median))
            .collect(),
        None => Vec::new(),
    };
    LearnabilityReport {
        games: per_game,
        baseline: baseline.map(str::to_string),
        ordinal,
    }
}

impl LearnabilityReport {
    /// Text table: one row per game with per-seed counts (`*` marks a run
    /// that hit the iteration cap) and the median.
    pub fn render(&self) -> String {
        let mut out = String::from("game\tmedian\titerations per seed\n");
        for g in &self.games {
            let runs: Vec<String> = g
                .runs
                .iter()
                .map(|r| {
                    format!(
                        "{}:{}{}",
                        r.seed,
                        r.iterations,
                        if r.converged { "" } else { "*" }
                    )
                })
                .collect();
            let _ = writeln!(out, "{}\t{}\t{}", g.game_id, g.median, runs.join(" "));
        }
        if let Some(base) = &self.baseline {
            for (id, holds) in &self.ordinal {
                let _ = writeln!(out, "{base} < {id}: {}", if *holds { "yes" } else { "no" });
            }
        }
        out
    }
}
