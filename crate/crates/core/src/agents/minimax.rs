use serde::{Deserialize, Serialize};

use super::{Agent, AgentKind};
use crate::engine::{direction_count, Board, Cell, GameState, Move, Player};
use crate::genome::{RuleSet, StepSize, PIECE_TYPES};
use crate::seed::SimRng;

/// Added to the weight of the piece-of-honor type so that losing or taking it
/// outweighs ordinary material swings.
pub const HONOR_BONUS: f64 = 50.0;

/// Per-type material weights derived from a rule set.
///
/// `w(t) = |directions(t)| * (2 if multiple-step else 1) + honor bonus if t is the piece of honor`.
/// Both capture styles weigh the same.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationWeights {
    pub per_type: [f64; PIECE_TYPES],
    pub honor_bonus: f64,
}

impl EvaluationWeights {
    pub fn from_rules(rules: &RuleSet) -> Self {
        Self::with_honor_bonus(rules, HONOR_BONUS)
    }

    pub fn with_honor_bonus(rules: &RuleSet, honor_bonus: f64) -> Self {
        let per_type = std::array::from_fn(|i| {
            let p = &rules.pieces[i];
            let step = if p.step == StepSize::Multiple {
                2.0
            } else {
                1.0
            };
            let honor = if rules.piece_of_honor.map(|h| h.index()) == Some(i) {
                honor_bonus
            } else {
                0.0
            };
            direction_count(p.movement) as f64 * step + honor
        });
        EvaluationWeights {
            per_type,
            honor_bonus,
        }
    }
}

/// Own weighted material minus the opponent's, from `pov`.
pub fn evaluate_board(board: &Board, weights: &EvaluationWeights, pov: Player) -> f64 {
    board.iter().flatten().fold(0.0, |acc, p| {
        let w = weights.per_type[p.kind.index()];
        if p.owner == pov {
            acc + w
        } else {
            acc - w
        }
    })
}

/// Min-max over the rule-based evaluation. Depth 1 by default.
///
/// Picks the best-valued move. When every child evaluates the same and
/// `approach` is set, prefers the move leaving the moved piece closest
/// (Chebyshev) to an opponent piece. Remaining ties go to the lowest `(from, to)`.
#[derive(Debug, Clone, Copy)]
pub struct MinimaxAgent {
    pub depth: u32,
    pub approach: bool,
}

impl Default for MinimaxAgent {
    fn default() -> Self {
        MinimaxAgent {
            depth: 1,
            approach: true,
        }
    }
}

impl MinimaxAgent {
    /// Evaluation of each child, in `legal` order, from the mover's view.
    pub fn child_values(&self, state: &GameState, rules: &RuleSet, legal: &[Move]) -> Vec<f64> {
        let weights = EvaluationWeights::from_rules(rules);
        let pov = state.side_to_move();
        legal
            .iter()
            .map(|mv| {
                if self.depth <= 1 {
                    evaluate_board(&state.board_after(mv), &weights, pov)
                } else {
                    -negamax(
                        &state.apply_unchecked(rules, mv),
                        rules,
                        &weights,
                        self.depth - 1,
                    )
                }
            })
            .collect()
    }

    /// Index into `legal` of the chosen move given precomputed child values.
    pub fn choose(&self, state: &GameState, legal: &[Move], values: &[f64]) -> usize {
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let approach = self.approach && values.iter().all(|&v| v == best);
        let pov = state.side_to_move();
        (0..legal.len())
            .filter(|&i| values[i] == best)
            .min_by_key(|&i| {
                let mv = &legal[i];
                let distance = if approach {
                    nearest_opponent(&state.board_after(mv), mv.to, pov)
                } else {
                    0
                };
                (distance, mv.from, mv.to, i)
            })
            .expect("at least one legal move")
    }
}

fn nearest_opponent(board: &Board, at: Cell, pov: Player) -> u8 {
    Cell::all()
        .filter(|c| matches!(board[c.index()], Some(p) if p.owner != pov))
        .map(|c| c.chebyshev(at))
        .min()
        .unwrap_or(u8::MAX)
}

fn negamax(state: &GameState, rules: &RuleSet, weights: &EvaluationWeights, depth: u32) -> f64 {
    let pov = state.side_to_move();
    if depth == 0 || state.status().is_over() {
        return evaluate_board(state.board(), weights, pov);
    }
    state
        .legal_moves(rules)
        .iter()
        .map(|mv| -negamax(&state.apply_unchecked(rules, mv), rules, weights, depth - 1))
        .fold(f64::NEG_INFINITY, f64::max)
}

impl Agent for MinimaxAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Minimax
    }

    fn select(
        &self,
        state: &GameState,
        rules: &RuleSet,
        legal: &[Move],
        _rng: &mut SimRng,
    ) -> Move {
        assert!(
            !legal.is_empty(),
            "min-max agent called without legal moves"
        );
        let values = self.child_values(state, rules, legal);
        legal[self.choose(state, legal, &values)].clone()
    }
}
