//! Survey statistics: coding answers, the mean-code correlation statistic and
//! its upper-tail p-value under a null model of independent answers.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::rng_for;

pub const DEFAULT_ALPHA: f64 = 0.17;
/// Exact computation is used while `3^N` stays at or below this.
pub const EXACT_LIMIT: f64 = 1e6;
pub const DEFAULT_TRIALS: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatingCode {
    Liked,
    Disliked,
    Neutral,
}

impl std::str::FromStr for RatingCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "liked" | "yes" => Ok(RatingCode::Liked),
            "disliked" | "no" => Ok(RatingCode::Disliked),
            "neutral" => Ok(RatingCode::Neutral),
            _ => Err(format!("unknown rating code '{s}'")),
        }
    }
}

/// One stored rating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rating {
    pub subject_id: String,
    pub game_id: String,
    pub run_index: u8,
    pub code: RatingCode,
    /// Seconds since the Unix epoch.
    #[serde(default)]
    pub timestamp: u64,
}

/// How answers map onto `{-1, 0, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coding {
    /// yes +1, no -1, neutral 0.
    #[default]
    Signed,
    /// yes +1, no and neutral 0.
    NoAsZero,
}

impl Coding {
    pub fn code(self, answer: RatingCode) -> i8 {
        match (self, answer) {
            (_, RatingCode::Liked) => 1,
            (Coding::Signed, RatingCode::Disliked) => -1,
            _ => 0,
        }
    }
}

impl std::str::FromStr for Coding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signed" => Ok(Coding::Signed),
            "no-as-zero" => Ok(Coding::NoAsZero),
            _ => Err(format!("unknown coding '{s}' (signed | no-as-zero)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveySample {
    codes: Vec<i8>,
}

impl SurveySample {
    /// `None` when empty or when a code is outside `{-1, 0, 1}`.
    pub fn new(codes: Vec<i8>) -> Option<Self> {
        (!codes.is_empty() && codes.iter().all(|c| (-1..=1).contains(c)))
            .then_some(SurveySample { codes })
    }

    pub fn from_answers(answers: &[RatingCode], coding: Coding) -> Option<Self> {
        Self::new(answers.iter().map(|&a| coding.code(a)).collect())
    }

    pub fn codes(&self) -> &[i8] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Mean of the codes.
pub fn correlation_c(sample: &SurveySample) -> f64 {
    let sum: i64 = sample.codes.iter().map(|&c| i64::from(c)).sum();
    sum as f64 / sample.len() as f64
}

/// Distribution of a single answer under the null: probabilities of -1, 0, +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullModel {
    pub probs: [f64; 3],
}

impl NullModel {
    pub fn uniform() -> Self {
        NullModel {
            probs: [1.0 / 3.0; 3],
        }
    }
}

impl Default for NullModel {
    fn default() -> Self {
        Self::uniform()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValueMethod {
    Exact,
    MonteCarlo { trials: u64, std_error: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub p: f64,
    pub method: PValueMethod,
}

impl PValue {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p < alpha
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            PValueMethod::Exact => write!(f, "{:.9} (exact)", self.p),
            PValueMethod::MonteCarlo { trials, std_error } => {
                write!(
                    f,
                    "{:.9} (monte carlo, {trials} trials, se {std_error:.2e})",
                    self.p
                )
            }
        }
    }
}

/// Smallest code sum that reaches a mean of `c` over `n` answers.
fn min_sum(c: f64, n: usize) -> i64 {
    (c * n as f64 - 1e-9).ceil() as i64
}

/// `P(mean >= c)` by exact enumeration of the sum distribution.
pub fn p_value_exact(c: f64, n: usize, null: &NullModel) -> f64 {
    let offset = n as i64;
    // dist[s + n] = P(sum = s) after the answers processed so far.
    let mut dist = vec![0.0; 2 * n + 1];
    dist[n] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; 2 * n + 1];
        for (i, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (delta, &q) in null.probs.iter().enumerate() {
                let j = i + delta;
                if j >= 1 && j - 1 < next.len() {
                    next[j - 1] += p * q;
                }
            }
        }
        dist = next;
    }
    let threshold = min_sum(c, n);
    dist.iter()
        .enumerate()
        .filter(|&(i, _)| i as i64 - offset >= threshold)
        .map(|(_, p)| p)
        .sum::<f64>()
        .min(1.0)
}

/// Seeded Monte Carlo estimate of `P(mean >= c)`.
pub fn p_value_monte_carlo(c: f64, n: usize, null: &NullModel, trials: u64, seed: u64) -> PValue {
    let mut rng = rng_for(seed);
    let threshold = min_sum(c, n);
    let (p_neg, p_zero) = (null.probs[0], null.probs[0] + null.probs[1]);
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut sum = 0i64;
        for _ in 0..n {
            let u: f64 = rng.gen();
            sum += if u < p_neg {
                -1
            } else if u < p_zero {
                0
            } else {
                1
            };
        }
        if sum >= threshold {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    let std_error = (p * (1.0 - p) / trials as f64).sqrt();
    PValue {
        p,
        method: PValueMethod::MonteCarlo { trials, std_error },
    }
}

/// Exact when `3^n <= 10^6`, Monte Carlo with `trials` draws otherwise.
pub fn p_value(c: f64, n: usize, null: &NullModel, trials: u64, seed: u64) -> PValue {
    if 3f64.powi(n as i32) <= EXACT_LIMIT {
        PValue {
            p: p_value_exact(c, n, null),
            method: PValueMethod::Exact,
        }
    } else {
        p_value_monte_carlo(c, n, null, trials, seed)
    }
}

/// Collapses each subject's runs of a game into one answer: disliked if any
/// run was disliked, liked if any run was liked, neutral otherwise. Returns
/// answers per game id, ordered by subject id.
pub fn aggregate_ratings(ratings: &[Rating]) -> BTreeMap<String, Vec<(String, RatingCode)>> {
    let mut per: BTreeMap<(String, String), RatingCode> = BTreeMap::new();
    for r in ratings {
        let slot = per
            .entry((r.game_id.clone(), r.subject_id.clone()))
            .or_insert(RatingCode::Neutral);
        *slot = match (*slot, r.code) {
            (RatingCode::Disliked, _) | (_, RatingCode::Disliked) => RatingCode::Disliked,
            (RatingCode::Liked, _) | (_, RatingCode::Liked) => RatingCode::Liked,
            _ => RatingCode::Neutral,
        };
    }
    let mut out: BTreeMap<String, Vec<(String, RatingCode)>> = BTreeMap::new();
    for ((game, subject), code) in per {
        out.entry(game).or_default().push((subject, code));
    }
    out
}
