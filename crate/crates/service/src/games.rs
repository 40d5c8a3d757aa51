//! Catalogue of playable games: the bundled fixtures plus any archived games.

use std::path::Path;

use boardforge::evolve::parse_archive_rows;
use boardforge::fixtures::Fixture;
use boardforge::genome::{Chromosome, RuleSet};
use serde::Serialize;

use crate::error::StartupError;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GameEntry {
    pub id: String,
    pub display_name: String,
    pub source: &'static str,
    pub chromosome: Chromosome,
    #[serde(skip)]
    pub rules: RuleSet,
}

pub fn fixture_games() -> Vec<GameEntry> {
    Fixture::ALL
        .into_iter()
        .map(|f| GameEntry {
            id: f.id().to_string(),
            display_name: f.display_name().to_string(),
            source: "fixture",
            chromosome: f.chromosome(),
            rules: f.rules(),
        })
        .collect()
}

/// Reads `archive.tsv` from a directory, or the file itself. Slots without a
/// chromosome are skipped.
pub fn archive_games(path: &Path) -> Result<Vec<GameEntry>, StartupError> {
    let file = if path.is_dir() {
        path.join("archive.tsv")
    } else {
        path.to_path_buf()
    };
    let err = |reason: String| StartupError::Archive {
        path: file.display().to_string(),
        reason,
    };
    let text = std::fs::read_to_string(&file).map_err(|e| err(e.to_string()))?;
    let rows = parse_archive_rows(&text).map_err(|e| err(e.to_string()))?;
    let mut games = Vec::new();
    for row in rows {
        let Some(chromosome) = row.chromosome else {
            continue;
        };
        let rules = chromosome
            .decode()
            .map_err(|e| err(format!("{} slot {}: {e}", row.metric, row.slot)))?;
        games.push(GameEntry {
            id: format!("archive-{}-{}", row.metric, row.slot),
            display_name: format!("Archive: best {} #{}", row.metric, row.slot),
            source: "archive",
            chromosome,
            rules,
        });
    }
    Ok(games)
}
