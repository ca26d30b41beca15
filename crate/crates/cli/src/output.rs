//! Output routing and atomic file writes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ANCILLA_OUT_DIR";

/// Where a command's primary output goes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    /// `--out` wins; otherwise `$ANCILLA_OUT_DIR/<default_name>`; otherwise stdout.
    pub fn resolve(out: Option<&Path>, default_name: &str) -> Self {
        if let Some(p) = out {
            return Destination::File(p.to_path_buf());
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Destination::File(Path::new(&dir).join(default_name)),
            _ => Destination::Stdout,
        }
    }

    pub fn write(&self, contents: &str) -> io::Result<()> {
        match self {
            Destination::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                out.flush()
            }
            Destination::File(p) => write_atomic(p, contents),
        }
    }
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
