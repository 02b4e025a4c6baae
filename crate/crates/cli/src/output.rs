//! Output files: CSV data, JSON metadata, atomic commit.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use coinwalk::Tolerances;
use serde::{Deserialize, Serialize};

use crate::config::WalkConfig;
use crate::error::CliError;

/// `<path><suffix>`, e.g. `walk.csv` -> `walk.csv.meta.json`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn meta_path(out: &Path) -> PathBuf {
    sibling(out, ".meta.json")
}

/// Which command produced the outputs, with its command-specific settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum CommandRecord {
    Run {},
    Sweep { betas: Vec<f64> },
    Mix { epsilon: f64 },
    Trajectory { samples: usize, seed: u64 },
}

/// Crossing times reported by `mix`; `None` means no crossing within the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixSummary {
    pub quantum_time_averaged: Option<usize>,
    pub quantum_instantaneous: Option<usize>,
    pub classical_instantaneous: Option<usize>,
    pub classical_time_averaged: Option<usize>,
    /// Compares the quantum time-averaged curve with the classical
    /// instantaneous one: `quantum`, `classical`, `tie` or `neither`.
    pub first_to_cross: String,
}

/// JSON sidecar. Holds no output paths, so replaying it elsewhere gives
/// byte-identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub library_version: String,
    pub command: CommandRecord,
    pub config: WalkConfig,
    pub tolerances: Tolerances,
    pub rng_algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<MixSummary>,
}

impl Metadata {
    pub fn new(command: CommandRecord, config: WalkConfig) -> Self {
        Self {
            tool: "coinwalk".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            library_version: coinwalk::VERSION.into(),
            command,
            config,
            tolerances: Tolerances::default(),
            rng_algorithm: coinwalk::rng::RNG_ALGORITHM.into(),
            mix: None,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("metadata serializes");
        bytes.push(b'\n');
        bytes
    }
}

/// Serializes rows with a header into CSV bytes.
pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    w.into_inner().expect("in-memory CSV flush")
}

/// Files to write together. Nothing touches the destination paths until
/// every file has been fully written to a temporary file next to it.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(self) -> Result<(), CliError> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let write_err = |source| CliError::Write {
                path: path.clone(),
                source,
            };
            let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(write_err)?;
            tmp.write_all(&bytes).map_err(write_err)?;
            tmp.as_file().sync_all().map_err(write_err)?;
            staged.push((tmp, path));
        }
        for (tmp, path) in staged {
            tmp.persist(&path).map_err(|e| CliError::Write {
                path,
                source: e.error,
            })?;
        }
        Ok(())
    }
}
