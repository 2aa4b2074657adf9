//! Run manifests: everything needed to regenerate a run's outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::{read_text, sha256_file, write_text};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self, CliError> {
        Ok(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub engine_version: String,
    pub subcommand: String,
    /// Arguments after the program name, with the resolved seed spelled out.
    pub argv: Vec<String>,
    /// Directory relative paths in `argv` are resolved against.
    pub cwd: String,
    pub inputs: Vec<FileDigest>,
    pub master_seed: u64,
    pub iterations: u64,
    /// `seeds[i]` is the derived seed of iteration `i`.
    pub seeds: Vec<u64>,
    pub outputs: Vec<FileDigest>,
}

/// What a subcommand read, wrote and seeded.
#[derive(Debug, Default)]
pub struct RunRecord {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        serde_json::from_str(&read_text(path)?)
            .map_err(|e| CliError::user(format!("{}: not a run manifest: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_text(path, &text)
    }
}

/// `args` with `--seed <seed>` present exactly once.
pub fn normalize_argv(args: &[String], seed: u64) -> Vec<String> {
    let has_seed = args.iter().any(|a| a == "--seed" || a.starts_with("--seed="));
    let mut out = args.to_vec();
    if !has_seed && !out.is_empty() {
        out.insert(1, format!("--seed={seed}"));
    }
    out
}

pub fn digests(paths: &[PathBuf]) -> Result<Vec<FileDigest>, CliError> {
    paths.iter().map(|p| FileDigest::of(p)).collect()
}
