//! On-disk store of sample tables keyed by problem hash.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use slrsm_core::sampling::TABLE_FORMAT_VERSION;
use slrsm_core::SampleTable;

use crate::output::write_atomic;

const PREFIX: &str = "table-";
const SUFFIX: &str = ".json";

#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{PREFIX}{hash}{SUFFIX}"))
    }

    /// The cached table for `hash`. Unreadable, stale or mismatched entries
    /// count as misses.
    pub fn load(&self, hash: &str) -> Option<SampleTable> {
        let text = fs::read_to_string(self.path_for(hash)).ok()?;
        let table: SampleTable = serde_json::from_str(&text).ok()?;
        let usable = table.format_version == TABLE_FORMAT_VERSION
            && table.problem_hash == hash
            && table.validate().is_ok();
        usable.then_some(table)
    }

    pub fn store(&self, table: &SampleTable) -> io::Result<PathBuf> {
        let path = self.path_for(&table.problem_hash);
        let json = serde_json::to_string(table).map_err(io::Error::other)?;
        write_atomic(&path, json.as_bytes())?;
        Ok(path)
    }

    /// Removes every cached table; other files in the directory are left
    /// alone. Returns the number of tables removed.
    pub fn clear(&self) -> io::Result<usize> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(entries) => entries,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        let mut removed = 0;
        for entry in entries {
            let entry = entry?;
            let name = entry.file_name();
            let name = name.to_string_lossy();
            if name.starts_with(PREFIX) && name.ends_with(SUFFIX) {
                fs::remove_file(entry.path())?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}
