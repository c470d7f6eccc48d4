//! Write-once artifact cache keyed by strands, degree, space, mode and
//! crate version.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use jacobi_core::Mode;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Key {
    pub strands: usize,
    pub degree: usize,
    pub space: String,
    pub mode: Mode,
    pub ext: &'static str,
}

impl Key {
    fn file_name(&self) -> String {
        format!("{}-m{}-n{}-{}.{}", self.space, self.strands, self.degree, self.mode, self.ext)
    }
}

pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Cache {
        Cache { root }
    }

    pub fn path(&self, key: &Key) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("v{VERSION}")).join(key.file_name()))
    }

    /// Cached bytes for `key`, computing and storing them on a miss.
    pub fn get_or_compute(&self, key: &Key, compute: impl FnOnce() -> Result<String>) -> Result<String> {
        let Some(path) = self.path(key) else {
            return compute();
        };
        match fs::read_to_string(&path) {
            Ok(text) => {
                log::info!("cache hit {}", path.display());
                return Ok(text);
            }
            Err(e) if e.kind() == ErrorKind::NotFound => {}
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        }
        let text = compute()?;
        write_once(&path, &text)?;
        Ok(text)
    }
}

/// Atomic create: the file appears complete or not at all, and an existing
/// file is never replaced.
pub fn write_once(path: &Path, text: &str) -> Result<()> {
    let dir = path.parent().context("cache path has no parent")?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    match tmp.persist_noclobber(path) {
        Ok(_) => Ok(()),
        Err(e) if e.error.kind() == ErrorKind::AlreadyExists => Ok(()),
        Err(e) => Err(e.error).with_context(|| format!("writing {}", path.display())),
    }
}

/// Atomic replace, for output files.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
