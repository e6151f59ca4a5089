//! Command-line front end: JSON instance documents in, verdict reports out.
//!
//! Exit codes: `0` all checks pass (or both sides of an equivalence agree),
//! `1` a check failed, `2` the input is invalid.

pub mod commands;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod report;

use std::path::{Path, PathBuf};

pub use commands::{check, correspond, theorem, Direction, Outcome, Suite};
pub use document::{Instance, InstanceDocument};
pub use error::{CliError, CliResult};
pub use report::ReportDocument;

/// Environment variable naming the default fixture directory.
pub const FIXTURE_ENV: &str = "HYPERCOURANT_FIXTURES";

/// `path` itself if it exists, else the same name (optionally with
/// `.json`) inside the fixture directory.
pub fn resolve_input(path: &Path, fixture_dir: Option<&Path>) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Some(dir) = fixture_dir {
        let direct = dir.join(path);
        if direct.exists() {
            return direct;
        }
        let with_ext = dir.join(path).with_extension("json");
        if with_ext.exists() {
            return with_ext;
        }
    }
    path.to_path_buf()
}

pub fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
