//! Append-only JSON-lines cache of computed indices.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub v: u32,
    pub p: u32,
    pub ell: u64,
    pub space: String,
    pub k: u64,
    pub slack: usize,
    pub index: usize,
}

impl CacheRecord {
    fn key(&self) -> Key {
        (self.p, self.ell, self.space.clone(), self.k, self.slack)
    }
}

type Key = (u32, u64, String, u64, usize);

#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    map: HashMap<Key, usize>,
    /// Lines that were unreadable or from another schema version.
    pub skipped: usize,
}

impl Cache {
    /// No path gives an in-memory cache that is never written.
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let mut cache = Cache { path: path.map(Path::to_path_buf), ..Cache::default() };
        let Some(path) = path else { return Ok(cache) };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e).with_context(|| format!("opening cache {}", path.display())),
        };
        file.lock_shared()?;
        for line in BufReader::new(&file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheRecord>(&line) {
                Ok(rec) if rec.v == SCHEMA_VERSION => {
                    cache.map.insert(rec.key(), rec.index);
                }
                _ => cache.skipped += 1,
            }
        }
        file.unlock()?;
        Ok(cache)
    }

    pub fn get(&self, p: u32, ell: u64, space: &str, k: u64, slack: usize) -> Option<usize> {
        self.map.get(&(p, ell, space.to_string(), k, slack)).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Appends the records in one locked write.
    pub fn append(&mut self, records: &[CacheRecord]) -> Result<()> {
        for r in records {
            self.map.insert(r.key(), r.index);
        }
        let Some(path) = &self.path else { return Ok(()) };
        if records.is_empty() {
            return Ok(());
        }
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(r)?);
            buf.push('\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening cache {}", path.display()))?;
        file.lock()?;
        file.write_all(buf.as_bytes())?;
        file.flush()?;
        file.unlock()?;
        Ok(())
    }
}
