//! Run manifests: a flat JSON record of every resolved setting a run used,
//! sufficient to reproduce its outputs byte for byte with `gdr replay`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{CliError, ResolvedRun};

/// Resolved configuration and paths of a single `gdr run` invocation.
///
/// Serialized as a single flat JSON object. `started_at_unix` is provenance
/// only; replaying ignores it, so two manifests of the same run differ in at
/// most that field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub started_at_unix: u64,
    pub input: String,
    pub label_column: String,
    pub output: String,
    pub metrics: Option<String>,
    pub plot_dir: Option<String>,
    pub method: String,
    pub alpha_radial: f64,
    pub alpha_polar: f64,
    pub alpha_azimuthal: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub use_pca: bool,
    pub lof_k: usize,
    pub stabilized: bool,
    pub seed: u64,
    pub r_min: f64,
    pub per_pair_cap: bool,
    pub step_scale: f64,
}

impl RunManifest {
    pub fn from_resolved(run: &ResolvedRun, started_at_unix: u64) -> Self {
        let [alpha_radial, alpha_polar, alpha_azimuthal] = run.alpha.as_array();
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at_unix,
            input: run.input.display().to_string(),
            label_column: run.label_column.clone(),
            output: run.output.display().to_string(),
            metrics: run.metrics.as_ref().map(|p| p.display().to_string()),
            plot_dir: run.plot_dir.as_ref().map(|p| p.display().to_string()),
            method: crate::method_name(run.method).to_string(),
            alpha_radial,
            alpha_polar,
            alpha_azimuthal,
            max_iter: run.max_iter,
            tol: run.tol,
            use_pca: run.use_pca,
            lof_k: run.lof_k,
            stabilized: run.stabilized,
            seed: run.seed,
            r_min: run.guards.r_min,
            per_pair_cap: run.guards.per_pair_cap,
            step_scale: run.guards.step_scale,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
        fs::write(path, body + "\n")
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let body = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&body)
            .map_err(|e| CliError::Validation(format!("invalid manifest {}: {e}", path.display())))
    }

    pub fn to_resolved(&self) -> Result<ResolvedRun, CliError> {
        let method = crate::parse_method(&self.method)?;
        let alpha =
            gdr_core::AlphaWeights::new(self.alpha_radial, self.alpha_polar, self.alpha_azimuthal)
                .map_err(|e| CliError::Validation(format!("invalid manifest alphas: {e}")))?;
        let guards = gdr_core::StepGuards {
            r_min: self.r_min,
            per_pair_cap: self.per_pair_cap,
            step_scale: self.step_scale,
        };
        Ok(ResolvedRun {
            input: PathBuf::from(&self.input),
            label_column: self.label_column.clone(),
            output: PathBuf::from(&self.output),
            metrics: self.metrics.as_ref().map(PathBuf::from),
            plot_dir: self.plot_dir.as_ref().map(PathBuf::from),
            method,
            use_pca: self.use_pca,
            alpha,
            max_iter: self.max_iter,
            tol: self.tol,
            lof_k: self.lof_k,
            stabilized: self.stabilized,
            seed: self.seed,
            guards,
        })
    }
}
