//! Run manifests: the resolved command plus content hashes of its inputs
//! and outputs. Nothing time- or host-dependent is recorded, so a re-run
//! that reproduces the outputs also reproduces the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Destination, Task};
use crate::error::{io_at, CliError, Stage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub task: Task,
    /// Output file name for single-file commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_file: Option<String>,
    /// Input path to SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output file name to SHA-256.
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path, stage: Stage) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(io_at(stage, path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn input_paths(task: &Task) -> Vec<PathBuf> {
    let mut paths = vec![task.data().input.clone()];
    if let Task::Evaluate { selection, .. } = task {
        paths.push(selection.clone());
    }
    paths
}

pub fn hash_inputs(task: &Task) -> Result<BTreeMap<String, String>, CliError> {
    input_paths(task)
        .iter()
        .map(|p| Ok((p.display().to_string(), sha256_file(p, Stage::Ingest)?)))
        .collect()
}

/// File name of the manifest written next to a command's outputs.
pub fn manifest_name(dest: &Destination) -> String {
    match &dest.file {
        None => "manifest.json".into(),
        Some(name) => {
            let stem = Path::new(name)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or(name);
            format!("{stem}.manifest.json")
        }
    }
}

impl Manifest {
    pub fn new(
        task: &Task,
        dest: &Destination,
        inputs: BTreeMap<String, String>,
        written: &[PathBuf],
    ) -> Result<Self, CliError> {
        let outputs = written
            .iter()
            .map(|p| {
                let name = p
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                Ok((name, sha256_file(p, Stage::Manifest)?))
            })
            .collect::<Result<_, CliError>>()?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            task: task.clone(),
            output_file: dest.file.clone(),
            inputs,
            outputs,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| CliError::Manifest(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(io_at(Stage::Manifest, path))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_at(Stage::Manifest, path))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
    }

    /// Inputs whose current content no longer matches the recorded hash.
    pub fn changed_inputs(&self) -> Result<Vec<String>, CliError> {
        let now = hash_inputs(&self.task)?;
        Ok(self
            .inputs
            .iter()
            .filter(|(path, hash)| now.get(*path) != Some(*hash))
            .map(|(path, _)| path.clone())
            .collect())
    }

    /// Output names whose hashes differ from `other`.
    pub fn differing_outputs(&self, other: &Manifest) -> Vec<String> {
        let mut names: Vec<String> = self
            .outputs
            .iter()
            .filter(|(name, hash)| other.outputs.get(*name) != Some(*hash))
            .map(|(name, _)| name.clone())
            .collect();
        names.extend(
            other
                .outputs
                .keys()
                .filter(|name| !self.outputs.contains_key(*name))
                .cloned(),
        );
        names
    }
}
