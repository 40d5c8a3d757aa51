use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Agent, AgentKind};
use crate::engine::{Board, Cell, GameState, Move, Player, CELLS};
use crate::genome::RuleSet;
use crate::seed::SimRng;

pub const ANN_LAYERS: [usize; 5] = [64, 91, 40, 10, 1];
pub const WEIGHT_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Row-major `outputs x inputs`.
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    fn forward(&self, input: &[f64], output: &mut Vec<f64>) {
        output.clear();
        for o in 0..self.outputs {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            let sum: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + self.biases[o];
            output.push(sum.tanh());
        }
    }
}

/// Fully connected 64-91-40-10-1 network with tanh at every neuron.
/// Weights and biases stay within `[-2, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnController {
    layers: Vec<Layer>,
}

impl AnnController {
    pub fn zeros() -> Self {
        let layers = ANN_LAYERS
            .windows(2)
            .map(|w| Layer {
                inputs: w[0],
                outputs: w[1],
                weights: vec![0.0; w[0] * w[1]],
                biases: vec![0.0; w[1]],
            })
            .collect();
        AnnController { layers }
    }

    /// Uniform initialization in `[-range, range]` (clamped to the weight limit).
    pub fn random<R: Rng + ?Sized>(range: f64, rng: &mut R) -> Self {
        let range = range.clamp(0.0, WEIGHT_LIMIT);
        let mut net = Self::zeros();
        for p in net.params_mut() {
            *p = if range > 0.0 {
                rng.gen_range(-range..=range)
            } else {
                0.0
            };
        }
        net
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Flat parameter list: per layer, weights row-major then biases.
    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn from_params(params: &[f64]) -> Result<Self, String> {
        let mut net = Self::zeros();
        if params.len() != net.param_count() {
            return Err(format!(
                "expected {} parameters, got {}",
                net.param_count(),
                params.len()
            ));
        }
        if let Some(bad) = params
            .iter()
            .find(|p| !p.is_finite() || p.abs() > WEIGHT_LIMIT)
        {
            return Err(format!("parameter {bad} outside [-2, 2]"));
        }
        for (dst, src) in net.params_mut().zip(params) {
            *dst = *src;
        }
        Ok(net)
    }

    /// Gaussian perturbation of every parameter, clamped to `[-2, 2]`.
    pub fn mutated<R: Rng + ?Sized>(&self, sigma: f64, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        let mut child = self.clone();
        for p in child.params_mut() {
            *p = (*p + normal.sample(rng)).clamp(-WEIGHT_LIMIT, WEIGHT_LIMIT);
        }
        child
    }

    /// Board as seen from `pov`: own type t is `+t/6`, opponent's `-t/6`,
    /// empty 0, with `pov`'s home rows first.
    pub fn encode(board: &Board, pov: Player) -> [f64; CELLS] {
        let mut input = [0.0; CELLS];
        for cell in Cell::all() {
            let Some(p) = board[cell.index()] else {
                continue;
            };
            let oriented = if pov == Player::One {
                cell
            } else {
                cell.rotated()
            };
            let v = f64::from(p.kind.id()) / 6.0;
            input[oriented.index()] = if p.owner == pov { v } else { -v };
        }
        input
    }

    pub fn forward(&self, input: &[f64; CELLS]) -> f64 {
        let mut current = input.to_vec();
        let mut next = Vec::with_capacity(ANN_LAYERS[1]);
        for layer in &self.layers {
            layer.forward(&current, &mut next);
            std::mem::swap(&mut current, &mut next);
        }
        current[0]
    }

    pub fn evaluate(&self, board: &Board, pov: Player) -> f64 {
        self.forward(&Self::encode(board, pov))
    }

    /// Text dump: a header line of layer sizes, then one parameter per line.
    pub fn dump(&self) -> String {
        let mut out = ANN_LAYERS
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        out.push('\n');
        for p in self.params() {
            let _ = writeln!(out, "{p}");
        }
        out
    }

    pub fn load(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty network dump")?;
        let sizes: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| format!("bad layer size '{s}'")))
            .collect::<Result<_, _>>()?;
        if sizes != ANN_LAYERS {
            return Err(format!("layer sizes {sizes:?} do not match {ANN_LAYERS:?}"));
        }
        let params: Vec<f64> = lines
            .map(|l| l.trim().parse().map_err(|_| format!("bad parameter '{l}'")))
            .collect::<Result<_, _>>()?;
        Self::from_params(&params)
    }
}

/// Picks the child position the network scores highest for the mover.
#[derive(Debug, Clone, Copy)]
pub struct AnnAgent<'a> {
    pub net: &'a AnnController,
}

impl Agent for AnnAgent<'_> {
    fn kind(&self) -> AgentKind {
        AgentKind::Ann
    }

    fn select(
        &self,
        state: &GameState,
        _rules: &RuleSet,
        legal: &[Move],
        _rng: &mut SimRng,
    ) -> Move {
        assert!(
            !legal.is_empty(),
            "network agent called without legal moves"
        );
        let pov = state.side_to_move();
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, mv) in legal.iter().enumerate() {
            let v = self.net.evaluate(&state.board_after(mv), pov);
            if v > best.0 {
                best = (v, i);
            }
        }
        legal[best.1].clone()
    }
}
