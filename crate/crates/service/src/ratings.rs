//! Append-only rating store: one JSON record per line, reloaded at startup.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use boardforge::analysis::Rating;

use crate::error::StartupError;

pub struct RatingStore {
    path: PathBuf,
    file: File,
    seen: HashSet<(String, String, u8)>,
}

pub enum Insert {
    Stored,
    Duplicate,
}

impl RatingStore {
    pub fn open(path: &Path) -> Result<Self, StartupError> {
        let io = |source| StartupError::Ratings {
            path: path.display().to_string(),
            source,
        };
        let mut seen = HashSet::new();
        if path.exists() {
            for (i, line) in BufReader::new(File::open(path).map_err(io)?)
                .lines()
                .enumerate()
            {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                let r: Rating =
                    serde_json::from_str(&line).map_err(|e| StartupError::RatingsFormat {
                        path: path.display().to_string(),
                        line: i + 1,
                        reason: e.to_string(),
                    })?;
                seen.insert((r.subject_id, r.game_id, r.run_index));
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io)?;
        Ok(RatingStore {
            path: path.to_path_buf(),
            file,
            seen,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn insert(&mut self, rating: &Rating) -> std::io::Result<Insert> {
        let key = (
            rating.subject_id.clone(),
            rating.game_id.clone(),
            rating.run_index,
        );
        if self.seen.contains(&key) {
            return Ok(Insert::Duplicate);
        }
        let mut line = serde_json::to_string(rating).map_err(std::io::Error::other)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.seen.insert(key);
        Ok(Insert::Stored)
    }
}
