use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IoError;

pub const LOCK_FILE: &str = ".mre.lock";

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: impl AsRef<Path>) -> Result<Self, IoError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::AlreadyExists => IoError::Locked(dir.into()),
                _ => IoError::io(&path, e),
            })?;
        writeln!(file, "{}", std::process::id()).map_err(|e| IoError::io(&path, e))?;
        Ok(Self { path })
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

/// Record of one CLI job, written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: Option<serde_json::Value>,
    pub rng_seed: Option<u64>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: None,
            rng_seed: None,
            artifacts: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn artifact(&mut self, name: impl Into<String>) {
        self.artifacts.push(name.into());
    }

    pub fn time(&mut self, phase: impl Into<String>, seconds: f64) {
        self.timings.insert(phase.into(), seconds);
    }

    /// Checks that every artifact exists with nonzero size, then writes
    /// `manifest.json` into `dir`. Returns its path.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf, IoError> {
        let dir = dir.as_ref();
        for a in &self.artifacts {
            let p = dir.join(a);
            match std::fs::metadata(&p) {
                Ok(m) if m.len() > 0 => {}
                _ => return Err(IoError::Artifact(p)),
            }
        }
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| IoError::Json {
            path: path.clone(),
            message: e.to_string(),
        })?;
        std::fs::write(&path, text + "\n").map_err(|e| IoError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let lock = OutputLock::acquire(dir.path()).unwrap();
        assert!(matches!(OutputLock::acquire(dir.path()), Err(IoError::Locked(_))));
        drop(lock);
        assert!(OutputLock::acquire(dir.path()).is_ok());
    }

    #[test]
    fn manifest_checks_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("run");
        m.artifact("a.csv");
        assert!(matches!(m.write(dir.path()), Err(IoError::Artifact(_))));
        std::fs::write(dir.path().join("a.csv"), "x").unwrap();
        m.time("total", 1.5);
        let p = m.write(dir.path()).unwrap();
        let back: RunManifest = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
