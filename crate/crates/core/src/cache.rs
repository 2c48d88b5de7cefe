//! On-disk cache of solved correlator tables, one file per model and cutoff for each solver version.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cohomology::RingModel;
use crate::correlators::CorrelatorTable;
use crate::exact::{Rational, RationalRepr};
use crate::wdvv::{solve_recursion_with, SolveError, SOLVER_VERSION};

pub const CACHE_SCHEMA: &str = "qhforge.cache/1";
pub const CACHE_ENV: &str = "QHFORGE_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub schema: String,
    pub model: String,
    pub cutoff: RationalRepr,
    pub solver_version: u32,
    pub entries: usize,
}

/// Explicit directory, else `QHFORGE_CACHE`, else no cache.
pub fn cache_root(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub fn cache_file(dir: &Path, model: &str, cutoff: &Rational, version: u32) -> PathBuf {
    let c = if cutoff.is_integer() { cutoff.numer().to_string() } else { format!("{}_{}", cutoff.numer(), cutoff.denom()) };
    let safe: String = model.chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' { ch } else { '_' }).collect();
    dir.join(format!("{safe}-{c}-v{version}.jsonl"))
}

pub fn encode(table: &CorrelatorTable, version: u32) -> String {
    let header = CacheHeader {
        schema: CACHE_SCHEMA.into(),
        model: table.model().to_string(),
        cutoff: table.cutoff().into(),
        solver_version: version,
        entries: table.len(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    out.push_str(&table.to_jsonl());
    out
}

/// Parses a cache file; `None` on any mismatch or damage.
pub fn decode(text: &str, model: &str, cutoff: &Rational, version: u32) -> Option<CorrelatorTable> {
    let mut reader = BufReader::new(text.as_bytes());
    let mut first = String::new();
    reader.read_line(&mut first).ok()?;
    let header: CacheHeader = serde_json::from_str(first.trim_end()).ok()?;
    if header.schema != CACHE_SCHEMA
        || header.model != model
        || header.solver_version != version
        || header.cutoff.to_rational().ok()? != *cutoff
    {
        return None;
    }
    let table = CorrelatorTable::read_jsonl(reader).ok()?;
    (table.len() == header.entries && table.model() == model && table.cutoff() == cutoff).then_some(table)
}

pub fn load(dir: &Path, model: &str, cutoff: &Rational, version: u32) -> Option<CorrelatorTable> {
    let text = fs::read_to_string(cache_file(dir, model, cutoff, version)).ok()?;
    decode(&text, model, cutoff, version)
}

/// Writes through a temporary file and a rename.
pub fn store(dir: &Path, table: &CorrelatorTable, version: u32) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = cache_file(dir, table.model(), table.cutoff(), version);
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(encode(table, version).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

pub fn solve_cached(
    model: &RingModel,
    cutoff: &Rational,
    dir: Option<&Path>,
    parallel: bool,
) -> Result<(CorrelatorTable, CacheStatus), SolveError> {
    solve_cached_versioned(model, cutoff, dir, parallel, SOLVER_VERSION)
}

pub fn solve_cached_versioned(
    model: &RingModel,
    cutoff: &Rational,
    dir: Option<&Path>,
    parallel: bool,
    version: u32,
) -> Result<(CorrelatorTable, CacheStatus), SolveError> {
    let Some(dir) = dir else {
        return Ok((solve_recursion_with(model, cutoff, parallel)?, CacheStatus::Disabled));
    };
    if let Some(t) = load(dir, model.name(), cutoff, version) {
        return Ok((t, CacheStatus::Hit));
    }
    let table = solve_recursion_with(model, cutoff, parallel)?;
    // best effort
    let _ = store(dir, &table, version);
    Ok((table, CacheStatus::Miss))
}
