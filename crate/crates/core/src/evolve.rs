//! 1+1 evolution strategy over independent chromosome families, with a shared
//! archive holding the best two games seen per metric.
//!
//! Each iteration every family mutates its parent once and evaluates the
//! child. The child replaces the parent when the summed per-metric ratio
//! `child / parent` exceeds 4, i.e. when it is better on balance. The parent's
//! metrics are frozen at its own evaluation. Rank-based fitness over the
//! parents and children of an iteration is recorded in the trace for
//! reporting only.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FormatError, MetricsError};
use crate::genome::{Chromosome, DEFAULT_MUTATION_RATE};
use crate::metrics::{
    evaluate, rank_population, Metric, MetricsVector, DEFAULT_PLAYOUTS, UNIT_WEIGHTS,
};
use crate::seed::{derive_seed, derived_rng};

/// Promotion threshold on [`fitness_difference`].
pub const PROMOTION_THRESHOLD: f64 = 4.0;
const TERM_CAP: f64 = 2.0;

/// Sum over the four metrics of `1 - (p - c) / p`, i.e. `c / p`, with
/// `0/0 -> 1`, `c/0 -> 2` for positive `c`, and every term capped at 2.
pub fn fitness_difference(parent: &MetricsVector, child: &MetricsVector) -> f64 {
    Metric::ALL
        .iter()
        .map(|&m| {
            let (p, c) = (parent.value(m), child.value(m));
            let term = if p == 0.0 {
                if c > 0.0 {
                    TERM_CAP
                } else {
                    1.0
                }
            } else {
                1.0 - (p - c) / p
            };
            term.min(TERM_CAP)
        })
        .sum()
}

pub fn promotes(difference: f64) -> bool {
    difference > PROMOTION_THRESHOLD
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub families: usize,
    pub iterations: u32,
    pub playouts: usize,
    pub mutation_rate: f64,
    pub weights: [f64; 4],
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            families: 10,
            iterations: 100,
            playouts: DEFAULT_PLAYOUTS,
            mutation_rate: DEFAULT_MUTATION_RATE,
            weights: UNIT_WEIGHTS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub id: usize,
    pub parent: Chromosome,
    pub parent_metrics: MetricsVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub family: Family,
    pub child: Chromosome,
    /// `None` when the child could not be evaluated; the parent is kept.
    pub child_metrics: Option<MetricsVector>,
    pub difference: Option<f64>,
    pub promoted: bool,
}

/// Evaluates `chromosome` under the standard playout protocol.
pub fn evaluate_chromosome(
    chromosome: &Chromosome,
    playouts: usize,
    seed: u64,
) -> Result<MetricsVector, MetricsError> {
    let rules = chromosome.decode()?;
    Ok(evaluate(&rules, playouts, seed)?.metrics)
}

/// One 1+1 step: mutate, evaluate, promote on a difference above 4.
pub fn family_step(family: &Family, config: &EvolutionConfig, iteration: u32) -> StepOutcome {
    let mut rng = derived_rng(
        config.seed,
        &format!("evolve/mutate/{iteration}/{}", family.id),
    );
    let child = family.parent.mutate(config.mutation_rate, &mut rng);
    step_with_child(family, child, |c| {
        evaluate_chromosome(
            c,
            config.playouts,
            derive_seed(
                config.seed,
                &format!("evolve/eval/{iteration}/{}", family.id),
            ),
        )
    })
}

/// Promotion logic with an explicit child and evaluator.
pub fn step_with_child<F>(family: &Family, child: Chromosome, evaluate_child: F) -> StepOutcome
where
    F: FnOnce(&Chromosome) -> Result<MetricsVector, MetricsError>,
{
    match evaluate_child(&child) {
        Ok(child_metrics) => {
            let difference = fitness_difference(&family.parent_metrics, &child_metrics);
            let promoted = promotes(difference);
            let next = if promoted {
                Family {
                    id: family.id,
                    parent: child,
                    parent_metrics: child_metrics,
                }
            } else {
                family.clone()
            };
            StepOutcome {
                family: next,
                child,
                child_metrics: Some(child_metrics),
                difference: Some(difference),
                promoted,
            }
        }
        Err(e) => {
            warn!(
                "family {}: child evaluation failed, keeping parent: {e}",
                family.id
            );
            StepOutcome {
                family: family.clone(),
                child,
                child_metrics: None,
                difference: None,
                promoted: false,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub chromosome: Chromosome,
    pub metrics: MetricsVector,
}

/// Best two chromosomes ever evaluated on each metric.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Archive {
    /// Indexed by [`Metric::index`], then slot (0 = best).
    slots: [[Option<ArchiveEntry>; 2]; 4],
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn slot(&self, metric: Metric, slot: usize) -> Option<&ArchiveEntry> {
        self.slots[metric.index()][slot].as_ref()
    }

    pub fn value(&self, metric: Metric, slot: usize) -> Option<f64> {
        self.slot(metric, slot).map(|e| e.metrics.value(metric))
    }

    /// Slot values per metric, for monotonicity checks.
    pub fn values(&self) -> [[Option<f64>; 2]; 4] {
        std::array::from_fn(|m| std::array::from_fn(|s| self.value(Metric::ALL[m], s)))
    }

    pub fn is_full(&self) -> bool {
        self.slots.iter().flatten().all(Option::is_some)
    }

    /// Offers a chromosome to every metric's slots. A strictly better value
    /// displaces the incumbent; ties keep the incumbent; a chromosome already
    /// held for that metric is not inserted again. Returns whether anything changed.
    pub fn update(&mut self, chromosome: &Chromosome, metrics: &MetricsVector) -> bool {
        let mut changed = false;
        for metric in Metric::ALL {
            let slots = &mut self.slots[metric.index()];
            if slots.iter().flatten().any(|e| e.chromosome == *chromosome) {
                continue;
            }
            let v = metrics.value(metric);
            let entry = ArchiveEntry {
                chromosome: *chromosome,
                metrics: *metrics,
            };
            let beats = |slot: &Option<ArchiveEntry>| {
                slot.as_ref().is_none_or(|e| v > e.metrics.value(metric))
            };
            if beats(&slots[0]) {
                slots[1] = slots[0].take();
                slots[0] = Some(entry);
                changed = true;
            } else if beats(&slots[1]) {
                slots[1] = Some(entry);
                changed = true;
            }
        }
        changed
    }

    /// Filled slots in metric order, best first: `(metric, slot, entry)`.
    pub fn entries(&self) -> impl Iterator<Item = (Metric, usize, &ArchiveEntry)> {
        Metric::ALL.into_iter().flat_map(move |m| {
            self.slots[m.index()]
                .iter()
                .enumerate()
                .filter_map(move |(s, e)| e.as_ref().map(|e| (m, s, e)))
        })
    }

    pub fn rows(&self) -> Vec<ArchiveRow> {
        self.entries()
            .map(|(metric, slot, e)| ArchiveRow {
                metric,
                slot: slot + 1,
                chromosome: Some(e.chromosome),
                metrics: e.metrics,
            })
            .collect()
    }

    pub fn from_rows(rows: &[ArchiveRow]) -> Result<Archive, FormatError> {
        let mut archive = Archive::new();
        for (i, row) in rows.iter().enumerate() {
            let chromosome = row.chromosome.ok_or_else(|| FormatError::Line {
                line: i + 1,
                reason: "archive row without chromosome".into(),
            })?;
            if !(1..=2).contains(&row.slot) {
                return Err(FormatError::Line {
                    line: i + 1,
                    reason: format!("slot {} not 1 or 2", row.slot),
                });
            }
            archive.slots[row.metric.index()][row.slot - 1] = Some(ArchiveEntry {
                chromosome,
                metrics: row.metrics,
            });
        }
        Ok(archive)
    }
}

/// One line of the archive file.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveRow {
    pub metric: Metric,
    /// 1-based.
    pub slot: usize,
    /// `-` in the file when unknown.
    pub chromosome: Option<Chromosome>,
    pub metrics: MetricsVector,
}

pub const ARCHIVE_HEADER: &str =
    "# metric\tslot\tchromosome\tduration_raw\tduration_scaled\tintelligence\tdynamism\tusability\tn";

/// Tab-separated archive file, one row per filled slot.
pub fn format_archive_rows(rows: &[ArchiveRow]) -> String {
    let mut out = String::from(ARCHIVE_HEADER);
    out.push('\n');
    for r in rows {
        let m = &r.metrics;
        let chromosome = r
            .chromosome
            .map_or_else(|| "-".to_string(), |c| c.to_string());
        let raw = if m.duration_raw.is_nan() {
            "-".to_string()
        } else {
            m.duration_raw.to_string()
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{chromosome}\t{raw}\t{}\t{}\t{}\t{}\t{}",
            r.metric, r.slot, m.duration_scaled, m.intelligence, m.dynamism, m.usability, m.n
        );
    }
    out
}

pub fn parse_archive_rows(text: &str) -> Result<Vec<ArchiveRow>, FormatError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| FormatError::Line {
            line: i + 1,
            reason,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 9 {
            return Err(bad(format!(
                "expected 9 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let num = |k: usize| -> Result<f64, FormatError> {
            if fields[k] == "-" {
                return Ok(f64::NAN);
            }
            fields[k]
                .parse()
                .map_err(|_| bad(format!("field {}: '{}' is not a number", k + 1, fields[k])))
        };
        let metric = fields[0].parse().map_err(bad)?;
        let slot = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad slot '{}'", fields[1])))?;
        let chromosome = if fields[2] == "-" {
            None
        } else {
            Some(fields[2].parse()?)
        };
        let metrics = MetricsVector {
            duration_raw: num(3)?,
            duration_scaled: num(4)?,
            intelligence: num(5)?,
            dynamism: num(6)?,
            usability: num(7)?,
            n: fields[8]
                .parse()
                .map_err(|_| bad(format!("bad playout count '{}'", fields[8])))?,
        };
        rows.push(ArchiveRow {
            metric,
            slot,
            chromosome,
            metrics,
        });
    }
    Ok(rows)
}

/// One trace record per family per iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u32,
    pub family: usize,
    pub child: Chromosome,
    pub child_metrics: Option<MetricsVector>,
    pub difference: Option<f64>,
    pub promoted: bool,
    /// Parent after the step (the child when promoted).
    pub parent: Chromosome,
    pub parent_metrics: MetricsVector,
    /// Rank fitness among this iteration's parents and children.
    pub parent_fitness: f64,
    pub child_fitness: Option<f64>,
    /// Archive slot values per metric after this iteration's updates.
    pub archive: [[Option<f64>; 2]; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub archive: Archive,
    pub families: Vec<Family>,
    pub trace: Vec<TraceRecord>,
}

/// Runs the full loop. Families evaluate in parallel; the archive is updated
/// in family order after each iteration, so results do not depend on thread count.
pub fn run_evolution(config: &EvolutionConfig) -> Result<EvolutionRun, MetricsError> {
    let mut families = (1..=config.families)
        .into_par_iter()
        .map(|id| {
            let mut rng = derived_rng(config.seed, &format!("evolve/init/{id}"));
            let parent = Chromosome::random(&mut rng);
            let seed = derive_seed(config.seed, &format!("evolve/eval/0/{id}"));
            evaluate_chromosome(&parent, config.playouts, seed).map(|parent_metrics| Family {
                id,
                parent,
                parent_metrics,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut archive = Archive::new();
    for f in &families {
        archive.update(&f.parent, &f.parent_metrics);
    }

    let mut trace = Vec::with_capacity(config.families * config.iterations as usize);
    for iteration in 1..=config.iterations {
        let outcomes: Vec<StepOutcome> = families
            .par_iter()
            .map(|f| family_step(f, config, iteration))
            .collect();

        // Ranking population: every parent as it entered the iteration, then every evaluated child.
        let mut population: Vec<MetricsVector> =
            families.iter().map(|f| f.parent_metrics).collect();
        let child_slot: Vec<Option<usize>> = outcomes
            .iter()
            .map(|o| {
                o.child_metrics.map(|m| {
                    population.push(m);
                    population.len() - 1
                })
            })
            .collect();
        let ranks = rank_population(&population, config.weights);

        for o in &outcomes {
            if let Some(m) = &o.child_metrics {
                archive.update(&o.child, m);
            }
        }
        let snapshot = archive.values();
        for (k, o) in outcomes.iter().enumerate() {
            let parent_fitness = if o.promoted {
                child_slot[k].map(|s| ranks[s].fitness).unwrap_or_default()
            } else {
                ranks[k].fitness
            };
            trace.push(TraceRecord {
                iteration,
                family: o.family.id,
                child: o.child,
                child_metrics: o.child_metrics,
                difference: o.difference,
                promoted: o.promoted,
                parent: o.family.parent,
                parent_metrics: o.family.parent_metrics,
                parent_fitness,
                child_fitness: child_slot[k].map(|s| ranks[s].fitness),
                archive: snapshot,
            });
        }
        families = outcomes.into_iter().map(|o| o.family).collect();
    }
    Ok(EvolutionRun {
        archive,
        families,
        trace,
    })
}

pub fn write_trace<W: Write>(mut out: W, trace: &[TraceRecord]) -> std::io::Result<()> {
    for r in trace {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, FormatError> {
    let mut trace = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| FormatError::Line {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        trace.push(serde_json::from_str(&line).map_err(|e| FormatError::Line {
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(trace)
}
