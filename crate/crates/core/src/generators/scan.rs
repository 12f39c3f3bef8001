//! Block-wise scans over primes with an optional checkpoint file.
//!
//! The checkpoint holds the start of the next unfinished block as a plain
//! decimal number followed by a newline. It is rewritten after each block,
//! so an interrupted scan resumes at a block boundary.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::primes::SegmentedSieve;

/// Width of one sieve block.
pub const BLOCK: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    path: PathBuf,
}

impl Checkpoint {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Checkpoint { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// The stored next start, or `None` when the file does not exist.
    pub fn load(&self) -> Result<Option<u64>> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Checkpoint(format!("{}: {e}", self.path.display()))),
        };
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| Error::Checkpoint(format!("{}: missing newline", self.path.display())))?;
        body.parse()
            .map(Some)
            .map_err(|_| Error::Checkpoint(format!("{}: not a number: {body:?}", self.path.display())))
    }

    pub fn store(&self, next: u64) -> Result<()> {
        let tmp = self.path.with_extension("tmp");
        fs::write(&tmp, format!("{next}\n"))
            .and_then(|_| fs::rename(&tmp, &self.path))
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", self.path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ScanSummary {
    pub from: u64,
    pub to: u64,
    /// Where work actually started, after reading the checkpoint.
    pub started_at: u64,
    pub blocks: u64,
    pub primes: u64,
}

/// Runs `per_block` on the odd primes of each block of `[from, to]`, in
/// order, passing every row to `sink`. Rows from one block reach the sink
/// before the checkpoint moves past it.
pub fn run_scan<T>(
    from: u64,
    to: u64,
    checkpoint: Option<&Checkpoint>,
    mut per_block: impl FnMut(&[u64]) -> Result<Vec<T>>,
    mut sink: impl FnMut(T) -> Result<()>,
) -> Result<ScanSummary> {
    let from = from.max(3);
    let mut start = from;
    if let Some(cp) = checkpoint {
        if let Some(saved) = cp.load()? {
            if saved < from || saved > to.saturating_add(1) {
                return Err(Error::Checkpoint(format!(
                    "saved position {saved} lies outside [{from}, {to}]"
                )));
            }
            start = saved;
        }
    }
    let mut summary = ScanSummary {
        from,
        to,
        started_at: start,
        blocks: 0,
        primes: 0,
    };
    if to < from {
        return Ok(summary);
    }
    let sieve = SegmentedSieve::new(to);
    let mut lo = start;
    while lo <= to {
        let hi = lo.saturating_add(BLOCK).min(to + 1);
        let primes = sieve.primes_in(lo, hi);
        for row in per_block(&primes)? {
            sink(row)?;
        }
        summary.blocks += 1;
        summary.primes += primes.len() as u64;
        if let Some(cp) = checkpoint {
            cp.store(hi)?;
        }
        lo = hi;
    }
    Ok(summary)
}
