//! Run manifest: enough provenance to replay any output file byte for byte.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub name: String,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub artifact_version: String,
    pub command: String,
    pub root_seed: u64,
    pub config: RunConfig,
    /// How each stream used by the run was derived from the root seed.
    pub seed_derivations: Vec<String>,
    pub stages: Vec<StageTiming>,
    pub outputs: Vec<OutputDigest>,
}

/// Collects timings and output digests while a command runs.
pub struct ManifestBuilder {
    manifest: RunManifest,
    stage_start: Option<(String, Instant)>,
}

impl ManifestBuilder {
    pub fn new(command: &str, root_seed: u64, config: &RunConfig) -> Self {
        Self {
            manifest: RunManifest {
                schema: "lfi-kit/v1".into(),
                artifact_version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                root_seed,
                config: config.clone(),
                seed_derivations: Vec::new(),
                stages: Vec::new(),
                outputs: Vec::new(),
            },
            stage_start: None,
        }
    }

    pub fn note_seed(&mut self, derivation: &str) {
        self.manifest.seed_derivations.push(derivation.into());
    }

    pub fn begin_stage(&mut self, name: &str) {
        self.end_stage();
        self.stage_start = Some((name.into(), Instant::now()));
    }

    pub fn end_stage(&mut self) {
        if let Some((name, start)) = self.stage_start.take() {
            self.manifest.stages.push(StageTiming {
                name,
                wall_ms: start.elapsed().as_millis(),
            });
        }
    }

    pub fn record_output(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        self.manifest.outputs.push(OutputDigest {
            file: path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: format!("{digest:x}"),
        });
        Ok(())
    }

    pub fn write(mut self, out_dir: &Path) -> Result<PathBuf> {
        self.end_stage();
        let path = out_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self.manifest)
            .expect("manifest serializes");
        std::fs::write(&path, json)?;
        Ok(path)
    }
}
