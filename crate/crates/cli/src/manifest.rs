//! Run manifest: parameters, solver reports and SHA-256 checksums of every
//! artifact a run produced.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct ArtifactRecord {
    pub name: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
pub struct SolverRecord {
    pub label: String,
    pub iterations: usize,
    pub residual: f64,
    pub contraction_ratio_estimate: f64,
}

#[derive(Debug, Default, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub config: BTreeMap<String, BTreeMap<String, String>>,
    pub constants: BTreeMap<String, f64>,
    pub solver_reports: Vec<SolverRecord>,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<ArtifactRecord>,
    pub wall_seconds: f64,
    pub status: String,
}

impl Manifest {
    pub fn new(experiment: &str) -> Self {
        Manifest {
            experiment: experiment.to_string(),
            status: "ok".to_string(),
            ..Default::default()
        }
    }

    pub fn record_solver(&mut self, label: &str, report: &neurofield::dynamics::SolverReport) {
        self.solver_reports.push(SolverRecord {
            label: label.to_string(),
            iterations: report.iterations,
            residual: report.residual,
            contraction_ratio_estimate: report.contraction_ratio_estimate,
        });
    }

    /// Write bytes to `dir/name` and record the artifact checksum.
    pub fn write_artifact(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = dir.join(name);
        std::fs::write(&path, bytes)
            .with_context(|| format!("writing artifact {}", path.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.artifacts.push(ArtifactRecord {
            name: name.to_string(),
            path: path.display().to_string(),
            sha256: format!("{:x}", hasher.finalize()),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
