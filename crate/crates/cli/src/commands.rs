use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use boardforge::agents::{Agent, AgentKind, MinimaxAgent, RandomAgent};
use boardforge::analysis::{
    aggregate_ratings, correlation_c, diversity_count, learnability_experiment, p_value,
    select_diverse, ArchivedGame, Coding, LearnabilityConfig, NullModel, Rating, SurveySample,
};
use boardforge::engine::{playout, write_records, MatchRecord};
use boardforge::evolve::{
    format_archive_rows, parse_archive_rows, read_trace, run_evolution, write_trace,
    EvolutionConfig,
};
use boardforge::fixtures::Fixture;
use boardforge::genome::{Chromosome, RuleSet};
use boardforge::metrics::{evaluate, report_line, Metric};
use boardforge::seed::{derive_seed, rng_for};
use rayon::prelude::*;

use crate::error::{ensure, CliError};
use crate::GameSource;

type Out<'a> = dyn Write + 'a;

fn emit(out: &mut Out, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Runtime(format!("stdout: {e}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_chromosome(path: &Path) -> Result<Chromosome, CliError> {
    read(path)?
        .parse::<Chromosome>()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// A fixture id, or else a chromosome file; the file stem becomes the id.
fn load_game(name: &str) -> Result<(String, RuleSet), CliError> {
    if let Some(f) = Fixture::from_id(name) {
        return Ok((f.id().to_string(), f.rules()));
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Validation(format!(
            "'{name}' is neither a fixture id nor a file"
        )));
    }
    let id = path
        .file_stem()
        .map_or_else(|| name.to_string(), |s| s.to_string_lossy().into_owned());
    Ok((id, load_chromosome(path)?.decode()?))
}

fn resolve(source: &GameSource) -> Result<(String, Chromosome), CliError> {
    match (&source.chromosome, &source.fixture) {
        (Some(path), _) => Ok((path.display().to_string(), load_chromosome(path)?)),
        (None, Some(id)) => Fixture::from_id(id)
            .map(|f| (f.id().to_string(), f.chromosome()))
            .ok_or_else(|| CliError::Validation(format!("unknown fixture '{id}'"))),
        (None, None) => Err(CliError::Validation(
            "give --chromosome or --fixture".into(),
        )),
    }
}

pub fn evolve(config: &EvolutionConfig, dir: &Path, out: &mut Out) -> Result<(), CliError> {
    ensure(config.iterations >= 1, || {
        "--iterations must be at least 1".into()
    })?;
    ensure(config.families >= 1, || {
        "--families must be at least 1".into()
    })?;
    ensure(config.playouts >= 1, || {
        "--playouts must be at least 1".into()
    })?;
    ensure((0.0..=1.0).contains(&config.mutation_rate), || {
        "--mutation-rate must lie in [0, 1]".into()
    })?;
    ensure(
        config.weights.iter().all(|w| w.is_finite() && *w >= 0.0),
        || "--weights must be non-negative".into(),
    )?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let run = run_evolution(config)?;

    let archive_path = dir.join("archive.tsv");
    std::fs::write(&archive_path, format_archive_rows(&run.archive.rows()))
        .map_err(|e| CliError::io(&archive_path, e))?;
    let trace_path = dir.join("trace.jsonl");
    let file = File::create(&trace_path).map_err(|e| CliError::io(&trace_path, e))?;
    let mut w = BufWriter::new(file);
    write_trace(&mut w, &run.trace)
        .and_then(|()| w.flush())
        .map_err(|e| CliError::io(&trace_path, e))?;

    let promotions = run.trace.iter().filter(|r| r.promoted).count();
    let mut text = format!(
        "seed {} families {} iterations {} promotions {}\n",
        config.seed, config.families, config.iterations, promotions
    );
    text.push_str(&archive_table(&run.archive.rows()));
    text.push_str(&format!(
        "wrote {} and {}\n",
        archive_path.display(),
        trace_path.display()
    ));
    emit(out, &text)
}

fn archive_table(rows: &[boardforge::evolve::ArchiveRow]) -> String {
    let mut text = String::new();
    for (i, r) in rows.iter().enumerate() {
        let body = if r.chromosome.is_some() || !r.metrics.duration_scaled.is_nan() {
            report_line(&r.metrics, None)
        } else {
            "empty".to_string()
        };
        text.push_str(&format!("{}\t{} #{}\t{}\n", i + 1, r.metric, r.slot, body));
    }
    text
}

pub fn eval(source: &GameSource, n: usize, seed: u64, out: &mut Out) -> Result<(), CliError> {
    ensure(n >= 1, || "--n must be at least 1".into())?;
    let (label, chromosome) = resolve(source)?;
    let rules = chromosome.decode()?;
    let m = evaluate(&rules, n, seed)?.metrics;
    let text = format!(
        "game {label}\nchromosome {chromosome}\nn {n}\nseed {seed}\nduration_raw {}\nduration_scaled {}\nintelligence {}\ndynamism {}\nusability {}\n",
        m.duration_raw, m.duration_scaled, m.intelligence, m.dynamism, m.usability
    );
    emit(out, &text)
}

fn agent_for(kind: AgentKind) -> Result<Box<dyn Agent>, CliError> {
    match kind {
        AgentKind::Random => Ok(Box::new(RandomAgent)),
        AgentKind::Minimax => Ok(Box::new(MinimaxAgent::default())),
        AgentKind::Ann => Err(CliError::Validation(
            "simulate supports random and minimax agents".into(),
        )),
    }
}

pub fn simulate(
    source: &GameSource,
    games: usize,
    agents: [AgentKind; 2],
    seed: u64,
    file: Option<&Path>,
    out: &mut Out,
) -> Result<(), CliError> {
    ensure(games >= 1, || "--games must be at least 1".into())?;
    let (_, chromosome) = resolve(source)?;
    let rules = chromosome.decode()?;
    let (one, two) = (agent_for(agents[0])?, agent_for(agents[1])?);
    let records = (0..games)
        .into_par_iter()
        .map(|k| {
            let s = derive_seed(seed, &format!("simulate/{k}"));
            playout(&rules, one.as_ref(), two.as_ref(), s, &mut rng_for(s))
        })
        .collect::<Result<Vec<MatchRecord>, _>>()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    match file {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(f);
            write_records(&mut w, &records)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::io(path, e))
        }
        None => write_records(out, &records).map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}

fn archive_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("archive.tsv")
    } else {
        path.to_path_buf()
    }
}

pub fn diversity(
    archive: &Path,
    threshold: f64,
    select: usize,
    out: &mut Out,
) -> Result<(), CliError> {
    ensure((0.0..=1.0).contains(&threshold), || {
        "--threshold must lie in [0, 1]".into()
    })?;
    let path = archive_file(archive);
    let rows = parse_archive_rows(&read(&path)?)?;
    ensure(!rows.is_empty(), || {
        format!("{}: no archive rows", path.display())
    })?;
    let games: Vec<ArchivedGame> = rows.iter().map(ArchivedGame::from).collect();
    let counts = diversity_count(&games, threshold);
    let mut text = format!("# threshold {threshold}\ngame\tmetric\tslot\tcount\n");
    for (i, (r, c)) in rows.iter().zip(&counts).enumerate() {
        text.push_str(&format!("{}\t{}\t{}\t{}\n", i + 1, r.metric, r.slot, c));
    }
    let chosen: Vec<String> = select_diverse(&counts, select)
        .iter()
        .map(|i| (i + 1).to_string())
        .collect();
    text.push_str(&format!("selected {}\n", chosen.join(" ")));
    emit(out, &text)
}

pub fn learnability(
    names: &[String],
    config: Option<&Path>,
    baseline: Option<&str>,
    out: &mut Out,
) -> Result<(), CliError> {
    let config: LearnabilityConfig = match config {
        Some(path) => toml::from_str(&read(path)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        None => LearnabilityConfig::default(),
    };
    ensure(!config.seeds.is_empty(), || "config lists no seeds".into())?;
    ensure(config.coevolution.population >= 2, || {
        "population must be at least 2".into()
    })?;
    ensure(config.coevolution.max_iterations >= 1, || {
        "max_iterations must be at least 1".into()
    })?;
    let games = names
        .iter()
        .map(|s| load_game(s))
        .collect::<Result<Vec<_>, _>>()?;
    ensure(!games.is_empty(), || "no games given".into())?;
    let baseline = match baseline {
        Some(b) => {
            ensure(games.iter().any(|(id, _)| id == b), || {
                format!("baseline '{b}' is not among the games")
            })?;
            Some(b)
        }
        None => games
            .iter()
            .any(|(id, _)| id == "random")
            .then_some("random"),
    };
    let report = learnability_experiment(&games, &config, baseline);
    emit(out, &report.render())
}

fn load_ratings(path: &Path) -> Result<Vec<Rating>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut ratings = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line)
            .map_err(|e| CliError::Validation(format!("{} line {}: {e}", path.display(), i + 1)))?;
        ratings.push(r);
    }
    Ok(ratings)
}

pub fn survey_stats(
    path: &Path,
    alpha: f64,
    coding: Coding,
    trials: u64,
    seed: u64,
    out: &mut Out,
) -> Result<(), CliError> {
    ensure(alpha > 0.0 && alpha < 1.0, || {
        "--alpha must lie in (0, 1)".into()
    })?;
    ensure(trials >= 1, || "--trials must be at least 1".into())?;
    let per_game: BTreeMap<_, _> = aggregate_ratings(&load_ratings(path)?);
    let null = NullModel::uniform();
    let mut text = format!("# alpha {alpha} coding {coding:?}\ngame\tN\tc\tp\treject\n");
    for (game, answers) in &per_game {
        let codes: Vec<_> = answers.iter().map(|(_, code)| *code).collect();
        let Some(sample) = SurveySample::from_answers(&codes, coding) else {
            continue;
        };
        let c = correlation_c(&sample);
        let p = p_value(
            c,
            sample.len(),
            &null,
            trials,
            derive_seed(seed, &format!("survey/{game}")),
        );
        text.push_str(&format!(
            "{game}\t{}\t{c:.4}\t{p}\t{}\n",
            sample.len(),
            if p.rejects(alpha) { "yes" } else { "no" }
        ));
    }
    emit(out, &text)
}

pub fn report(trace: Option<&Path>, archive: Option<&Path>, out: &mut Out) -> Result<(), CliError> {
    let mut text = String::new();
    if let Some(path) = trace {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let records = read_trace(BufReader::new(file))?;
        text.push_str("iteration\tpromotions\tbest parent fitness");
        for m in Metric::ALL {
            text.push_str(&format!("\t{m} 1\t{m} 2"));
        }
        text.push('\n');
        let mut by_iteration: BTreeMap<u32, Vec<_>> = BTreeMap::new();
        for r in &records {
            by_iteration.entry(r.iteration).or_default().push(r);
        }
        for (iteration, rs) in &by_iteration {
            let promotions = rs.iter().filter(|r| r.promoted).count();
            let best = rs
                .iter()
                .map(|r| r.parent_fitness)
                .fold(f64::NEG_INFINITY, f64::max);
            text.push_str(&format!("{iteration}\t{promotions}\t{best}"));
            let snapshot = rs.last().map(|r| r.archive).unwrap_or_default();
            for v in snapshot.iter().flatten() {
                match v {
                    Some(x) => text.push_str(&format!("\t{x:.4}")),
                    None => text.push_str("\t-"),
                }
            }
            text.push('\n');
        }
    }
    if let Some(path) = archive {
        let path = archive_file(path);
        let rows = parse_archive_rows(&read(&path)?)?;
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&archive_table(&rows));
    }
    emit(out, &text)
}
