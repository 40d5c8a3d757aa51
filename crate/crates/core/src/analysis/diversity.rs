//! Diversity among archived games. Each game is compared with every other on
//! the metric it was archived for, as an absolute difference normalized by
//! that metric's maximum over the archive.

use crate::evolve::ArchiveRow;
use crate::metrics::{Metric, MetricsVector};

pub const DIVERSITY_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchivedGame {
    /// Metric the game was archived under.
    pub metric: Metric,
    pub metrics: MetricsVector,
}

impl From<&ArchiveRow> for ArchivedGame {
    fn from(row: &ArchiveRow) -> Self {
        ArchivedGame {
            metric: row.metric,
            metrics: row.metrics,
        }
    }
}

/// `|a - b| / max` on one metric; 0 when `max` is 0.
pub fn pair_diversity(
    a: &MetricsVector,
    b: &MetricsVector,
    metric: Metric,
    metric_max: f64,
) -> f64 {
    if metric_max == 0.0 {
        return 0.0;
    }
    ((a.value(metric) - b.value(metric)) / metric_max).abs()
}

/// For each game, how many other games differ from it by at least
/// `threshold` on the game's archived metric.
pub fn diversity_count(games: &[ArchivedGame], threshold: f64) -> Vec<usize> {
    let max_of = |m: Metric| games.iter().map(|g| g.metrics.value(m)).fold(0.0, f64::max);
    games
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let max = max_of(g.metric);
            games
                .iter()
                .enumerate()
                .filter(|&(j, h)| {
                    j != i && pair_diversity(&g.metrics, &h.metrics, g.metric, max) >= threshold
                })
                .count()
        })
        .collect()
}

/// Indices of the `k` highest counts, ties going to the lower index, in
/// selection order.
pub fn select_diverse(counts: &[usize], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(counts[i]));
    order.truncate(k);
    order
}
