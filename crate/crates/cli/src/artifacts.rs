//! Output staging. Everything is rendered in memory first and written in one
//! go, so a failed run leaves no half-written artifact set behind.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct ArtifactSet {
    files: Vec<(String, Vec<u8>)>,
}

impl ArtifactSet {
    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(CliError::internal)?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn add_text(&mut self, name: &str, text: String) {
        self.files.push((name.to_string(), text.into_bytes()));
    }

    pub fn names(&self) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    /// Writes every file under `dir` through a temporary name and renames
    /// them into place once all writes succeeded. On failure the files
    /// written so far are removed.
    pub fn commit(&self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(CliError::internal)?;
        let mut staged = Vec::with_capacity(self.files.len());
        let result = (|| -> anyhow::Result<Vec<PathBuf>> {
            for (name, bytes) in &self.files {
                let tmp = dir.join(format!(".{name}.partial"));
                fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
                staged.push(tmp);
            }
            let mut done = Vec::with_capacity(self.files.len());
            for ((name, _), tmp) in self.files.iter().zip(&staged) {
                let path = dir.join(name);
                fs::rename(tmp, &path)
                    .with_context(|| format!("moving {} into place", path.display()))?;
                done.push(path);
            }
            Ok(done)
        })();
        result.map_err(|e| {
            for tmp in &staged {
                let _ = fs::remove_file(tmp);
            }
            CliError::internal(e)
        })
    }
}
