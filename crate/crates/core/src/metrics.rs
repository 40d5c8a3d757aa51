//! Entertainment metrics computed from batches of playouts, and rank-based
//! combination across a population.
//!
//! * duration `D`: mean plies per game, then mapped onto `{0, 0.2, 0.5, 0.8, 1}`
//!   so that mid-length games score best;
//! * intelligence `I`: fraction of min-max vs random games the min-max side wins;
//! * dynamism `Dyn`: per game, mean over every piece of cells entered per ply
//!   alive, averaged over games;
//! * usability `U`: per game, total cell arrivals divided by the 64 usable
//!   cells, averaged over games.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{AgentKind, MinimaxAgent, RandomAgent};
use crate::engine::{playout, MatchRecord, Player, CELLS};
use crate::error::MetricsError;
use crate::genome::RuleSet;
use crate::seed::{derive_seed, rng_for};

pub const DEFAULT_PLAYOUTS: usize = 20;
pub const USABLE_CELLS: f64 = CELLS as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Duration,
    Intelligence,
    Dynamism,
    Usability,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Duration,
        Metric::Intelligence,
        Metric::Dynamism,
        Metric::Usability,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Duration => "duration",
            Metric::Intelligence => "intelligence",
            Metric::Dynamism => "dynamism",
            Metric::Usability => "usability",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsVector {
    pub duration_raw: f64,
    pub duration_scaled: f64,
    pub intelligence: f64,
    pub dynamism: f64,
    pub usability: f64,
    pub n: usize,
}

impl MetricsVector {
    /// Value on a ranking axis; duration uses the scaled value.
    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Duration => self.duration_scaled,
            Metric::Intelligence => self.intelligence,
            Metric::Dynamism => self.dynamism,
            Metric::Usability => self.usability,
        }
    }
}

pub fn duration(records: &[MatchRecord]) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyBatch);
    }
    let total: u64 = records.iter().map(|r| u64::from(r.plies)).sum();
    Ok(total as f64 / records.len() as f64)
}

/// Piecewise-constant preference for mid-length games. Intervals are closed
/// on the right: `[0,10]`, `(10,20]`, ... `(90,100]`.
pub fn scale_duration(d: f64) -> Result<f64, MetricsError> {
    if !(0.0..=100.0).contains(&d) {
        return Err(MetricsError::DurationOutOfRange(d));
    }
    let bands = [
        (10.0, 0.0),
        (20.0, 0.2),
        (30.0, 0.5),
        (40.0, 0.8),
        (60.0, 1.0),
        (70.0, 0.8),
        (80.0, 0.5),
        (90.0, 0.2),
    ];
    Ok(bands
        .iter()
        .find(|(upper, _)| d <= *upper)
        .map_or(0.0, |&(_, v)| v))
}

/// Fraction of games won by the min-max side; draws and losses count zero.
pub fn intelligence(records: &[MatchRecord]) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyBatch);
    }
    let mut wins = 0usize;
    for r in records {
        let seat = r
            .seat_of(AgentKind::Minimax)
            .ok_or(MetricsError::UntaggedRecord)?;
        if r.winner == Some(seat) {
            wins += 1;
        }
    }
    Ok(wins as f64 / records.len() as f64)
}

/// Summation in sorted order, so the result does not depend on input order.
fn ordered_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

/// Mean over games of the mean over all pieces of `C_i / L_i`.
pub fn dynamism(records: &[MatchRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let per_game = records
        .iter()
        .map(|r| {
            if r.pieces.is_empty() {
                return 0.0;
            }
            let ratios = r
                .pieces
                .iter()
                .map(|p| {
                    if p.life == 0 {
                        0.0
                    } else {
                        f64::from(p.changes) / f64::from(p.life)
                    }
                })
                .collect();
            ordered_sum(ratios) / r.pieces.len() as f64
        })
        .collect();
    ordered_sum(per_game) / records.len() as f64
}

/// Mean over games of total arrivals divided by the 64 usable cells.
pub fn usability(records: &[MatchRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let arrivals: u64 = records.iter().map(MatchRecord::total_cells_entered).sum();
    arrivals as f64 / USABLE_CELLS / records.len() as f64
}

/// Metrics from random-vs-random records (duration, dynamism, usability) and
/// min-max-vs-random records (intelligence).
pub fn metrics_from_records(
    random: &[MatchRecord],
    duels: &[MatchRecord],
) -> Result<MetricsVector, MetricsError> {
    let duration_raw = duration(random)?;
    Ok(MetricsVector {
        duration_raw,
        duration_scaled: scale_duration(duration_raw)?,
        intelligence: intelligence(duels)?,
        dynamism: dynamism(random),
        usability: usability(random),
        n: random.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub metrics: MetricsVector,
    pub random_games: Vec<MatchRecord>,
    pub duel_games: Vec<MatchRecord>,
}

/// Playout protocol for one rule set: `n` random-vs-random games and `n`
/// min-max-vs-random games with the min-max agent on player One in even games
/// and player Two in odd games. Game `k` uses seeds derived from `seed` with
/// labels `random/k` and `duel/k`.
pub fn evaluate(rules: &RuleSet, n: usize, seed: u64) -> Result<Evaluation, MetricsError> {
    evaluate_with(rules, n, seed, &MinimaxAgent::default())
}

/// [`evaluate`] with a configured min-max agent.
pub fn evaluate_with(
    rules: &RuleSet,
    n: usize,
    seed: u64,
    minimax: &MinimaxAgent,
) -> Result<Evaluation, MetricsError> {
    if n == 0 {
        return Err(MetricsError::EmptyBatch);
    }
    let random_games = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = derive_seed(seed, &format!("random/{k}"));
            playout(rules, &RandomAgent, &RandomAgent, s, &mut rng_for(s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let duel_games = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = derive_seed(seed, &format!("duel/{k}"));
            if minimax_seat(k) == Player::One {
                playout(rules, minimax, &RandomAgent, s, &mut rng_for(s))
            } else {
                playout(rules, &RandomAgent, minimax, s, &mut rng_for(s))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let metrics = metrics_from_records(&random_games, &duel_games)?;
    Ok(Evaluation {
        metrics,
        random_games,
        duel_games,
    })
}

/// Seat of the min-max agent in duel `k`.
pub fn minimax_seat(k: usize) -> Player {
    if k.is_multiple_of(2) {
        Player::One
    } else {
        Player::Two
    }
}

/// Per-metric ranks (P = best, 1 = worst) and the weighted sum of ranks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankFitness {
    /// Indexed by [`Metric::index`].
    pub ranks: [usize; 4],
    pub fitness: f64,
}

pub const UNIT_WEIGHTS: [f64; 4] = [1.0; 4];

/// Ranks each metric independently, best value getting rank `P`; equal values
/// are ordered by population index, earlier index ranking higher.
pub fn rank_population(population: &[MetricsVector], weights: [f64; 4]) -> Vec<RankFitness> {
    let p = population.len();
    let mut out = vec![
        RankFitness {
            ranks: [0; 4],
            fitness: 0.0
        };
        p
    ];
    for metric in Metric::ALL {
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| {
            population[b]
                .value(metric)
                .total_cmp(&population[a].value(metric))
        });
        for (position, &i) in order.iter().enumerate() {
            out[i].ranks[metric.index()] = p - position;
        }
    }
    for r in &mut out {
        r.fitness = Metric::ALL
            .iter()
            .map(|m| weights[m.index()] * r.ranks[m.index()] as f64)
            .sum();
    }
    out
}

/// One report line: `D scaledD I Dyn U rankD rankI rankDyn rankU FF`.
pub fn report_line(m: &MetricsVector, rank: Option<&RankFitness>) -> String {
    let mut line = format!(
        "D={:.4} Ds={} I={:.4} Dyn={:.6} U={:.6}",
        m.duration_raw, m.duration_scaled, m.intelligence, m.dynamism, m.usability
    );
    if let Some(r) = rank {
        line.push_str(&format!(
            " rD={} rI={} rDyn={} rU={} FF={}",
            r.ranks[0], r.ranks[1], r.ranks[2], r.ranks[3], r.fitness
        ));
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{EndReason, PieceLife};
    use crate::fixtures::Fixture;

    fn record(plies: u32, pieces: Vec<PieceLife>, cells: Vec<u32>) -> MatchRecord {
        MatchRecord {
            chromosome: Fixture::Game1.chromosome(),
            seed: 0,
            agents: [AgentKind::Random, AgentKind::Random],
            winner: None,
            end: EndReason::MoveCap,
            plies,
            pieces,
            cells,
        }
    }

    fn duel(minimax: Player, winner: Option<Player>) -> MatchRecord {
        let mut r = record(10, vec![], vec![0; 64]);
        r.agents = if minimax == Player::One {
            [AgentKind::Minimax, AgentKind::Random]
        } else {
            [AgentKind::Random, AgentKind::Minimax]
        };
        r.winner = winner;
        r
    }

    #[test]
    fn duration_is_mean_plies() {
        let rs: Vec<_> = [10, 20, 30, 40]
            .iter()
            .map(|&p| record(p, vec![], vec![0; 64]))
            .collect();
        assert_eq!(duration(&rs).unwrap(), 25.0);
        let full: Vec<_> = (0..20).map(|_| record(100, vec![], vec![0; 64])).collect();
        assert_eq!(duration(&full).unwrap(), 100.0);
        assert!(matches!(duration(&[]), Err(MetricsError::EmptyBatch)));
    }

    #[test]
    fn scaling_bands() {
        let cases = [
            (0.0, 0.0),
            (5.0, 0.0),
            (10.0, 0.0),
            (10.5, 0.2),
            (20.0, 0.2),
            (25.0, 0.5),
            (30.0, 0.5),
            (35.0, 0.8),
            (40.0, 0.8),
            (40.5, 1.0),
            (50.0, 1.0),
            (60.0, 1.0),
            (60.5, 0.8),
            (70.0, 0.8),
            (75.0, 0.5),
            (80.0, 0.5),
            (85.0, 0.2),
            (90.0, 0.2),
            (90.5, 0.0),
            (100.0, 0.0),
        ];
        for (d, expected) in cases {
            assert_eq!(scale_duration(d).unwrap(), expected, "D = {d}");
        }
        assert!(scale_duration(-0.1).is_err());
        assert!(scale_duration(100.1).is_err());
    }

    #[test]
    fn intelligence_counts_minimax_wins_only() {
        let mut rs = Vec::new();
        for k in 0..14 {
            let seat = minimax_seat(k);
            rs.push(duel(seat, Some(seat)));
        }
        for k in 14..17 {
            rs.push(duel(minimax_seat(k), None));
        }
        for k in 17..20 {
            let seat = minimax_seat(k);
            rs.push(duel(seat, Some(seat.opponent())));
        }
        assert!((intelligence(&rs).unwrap() - 0.7).abs() < 1e-12);
        let all: Vec<_> = (0..20)
            .map(|k| duel(minimax_seat(k), Some(minimax_seat(k))))
            .collect();
        assert_eq!(intelligence(&all).unwrap(), 1.0);
        assert!(matches!(
            intelligence(&[record(3, vec![], vec![0; 64])]),
            Err(MetricsError::UntaggedRecord)
        ));
    }

    #[test]
    fn dynamism_cases() {
        let still = record(
            0,
            vec![
                PieceLife {
                    owner: Player::One,
                    changes: 0,
                    life: 0,
                },
                PieceLife {
                    owner: Player::Two,
                    changes: 0,
                    life: 0,
                },
            ],
            vec![0; 64],
        );
        assert_eq!(dynamism(&[still]), 0.0);
        let runner = record(
            12,
            vec![PieceLife {
                owner: Player::One,
                changes: 12,
                life: 12,
            }],
            vec![0; 64],
        );
        assert_eq!(dynamism(&[runner]), 1.0);
    }

    #[test]
    fn dynamism_hand_trace() {
        // Two pieces, six plies. Piece A (One) enters 1 cell on plies 1, 3, 5:
        // C=3, L=6. Piece B (Two) slides 2 cells on ply 2, then is captured on
        // ply 5: C=2, L=5. Game term = (3/6 + 2/5) / 2 = 0.45.
        let game = record(
            6,
            vec![
                PieceLife {
                    owner: Player::One,
                    changes: 3,
                    life: 6,
                },
                PieceLife {
                    owner: Player::Two,
                    changes: 2,
                    life: 5,
                },
            ],
            vec![0; 64],
        );
        assert!((dynamism(&[game]) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn usability_cases() {
        assert_eq!(usability(&[record(0, vec![], vec![0; 64])]), 0.0);
        let mut cells = vec![0; 64];
        cells[20] = 1;
        assert_eq!(usability(&[record(1, vec![], cells)]), 1.0 / 64.0);
    }

    #[test]
    fn ranks_and_fitness() {
        let mk = |v: f64| MetricsVector {
            duration_raw: 50.0,
            duration_scaled: v,
            intelligence: v,
            dynamism: v,
            usability: v,
            n: 20,
        };
        let population: Vec<_> = (0..20).map(|i| mk(i as f64 / 20.0)).collect();
        let ranks = rank_population(&population, UNIT_WEIGHTS);
        for m in Metric::ALL {
            assert_eq!(ranks.iter().map(|r| r.ranks[m.index()]).sum::<usize>(), 210);
        }
        assert_eq!(ranks[19].fitness, 80.0);
        assert_eq!(ranks[0].fitness, 4.0);
    }

    #[test]
    fn ties_rank_earlier_index_higher() {
        let m = MetricsVector {
            duration_raw: 0.0,
            duration_scaled: 0.0,
            intelligence: 0.0,
            dynamism: 0.0,
            usability: 0.0,
            n: 1,
        };
        let ranks = rank_population(&[m, m, m], UNIT_WEIGHTS);
        assert_eq!(ranks[0].ranks, [3; 4]);
        assert_eq!(ranks[2].ranks, [1; 4]);
    }
}
