//! Global settings. Each one is looked up in order: command-line flag,
//! `RESIDUUM_*` environment variable, `key = value` config file, default.
//! Clap covers the first two; this module adds the file and the defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use residuum::modring::DEFAULT_TABLE_BOUND;

use crate::report::Format;

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Output encoding.
    #[arg(long, global = true, env = "RESIDUUM_FORMAT", value_enum)]
    pub format: Option<Format>,

    /// Largest residue table any command may build.
    #[arg(long, global = true, env = "RESIDUUM_TABLE_BOUND")]
    pub table_bound: Option<u64>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "RESIDUUM_JOBS")]
    pub jobs: Option<usize>,

    /// Config file of `key = value` lines (keys: format, table_bound, jobs).
    #[arg(long, global = true, env = "RESIDUUM_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub format: Format,
    pub table_bound: u64,
    /// `None` leaves the pool at its default size.
    pub jobs: Option<usize>,
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// dashes in keys are read as underscores.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("line {}: expected key = value", i + 1);
        };
        let key = k.trim().replace('-', "_");
        if !matches!(key.as_str(), "format" | "table_bound" | "jobs") {
            bail!("line {}: unknown key {key:?}", i + 1);
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

impl GlobalArgs {
    pub fn resolve(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => BTreeMap::new(),
        };
        let from_file = |key: &str| file.get(key).map(String::as_str);
        let format = match (self.format, from_file("format")) {
            (Some(f), _) => f,
            (None, Some(s)) => s.parse().map_err(anyhow::Error::msg).context("config format")?,
            (None, None) => Format::Human,
        };
        let table_bound = match (self.table_bound, from_file("table_bound")) {
            (Some(b), _) => b,
            (None, Some(s)) => s.parse().context("config table_bound")?,
            (None, None) => DEFAULT_TABLE_BOUND,
        };
        let jobs = match (self.jobs, from_file("jobs")) {
            (Some(j), _) => Some(j),
            (None, Some(s)) => Some(s.parse().context("config jobs")?),
            (None, None) => None,
        };
        if jobs == Some(0) {
            bail!("jobs must be at least 1");
        }
        Ok(Settings {
            format,
            table_bound,
            jobs,
        })
    }
}
