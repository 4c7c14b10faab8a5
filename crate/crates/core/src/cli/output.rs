use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::CliError;
use crate::kempf::{DEFAULT_TOL, RHO_CUTOFF, SERIES_XI_LIMIT};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KEPLER_TYZ_OUT_DIR";

/// Everything that determines a command's output. The output path is
/// excluded from the hash so the same run written twice hashes equal.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub tolerance: f64,
}

impl RunConfig {
    pub fn new(command: &'static str) -> Self {
        RunConfig {
            command,
            tolerance: DEFAULT_TOL,
            ..Default::default()
        }
    }

    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Trailing CSV comment line.
    pub fn metadata_line(&self) -> String {
        format!(
            "# version={} config_hash={} tolerances=series:{:e};rho_cutoff:{:e};xi_limit:{}\n",
            env!("CARGO_PKG_VERSION"),
            self.hash(),
            self.tolerance,
            RHO_CUTOFF,
            SERIES_XI_LIMIT,
        )
    }
}

/// Resolves where a command writes. `--out` wins, then the environment
/// directory; `required` commands fall back to the working directory.
pub fn resolve(explicit: Option<&Path>, default_name: &str, required: bool) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir).join(default_name)),
        _ => required.then(|| PathBuf::from(default_name)),
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

/// Builds CSV bytes from a header and rows, then appends the metadata line.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>], config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(CliError::csv)?;
    for row in rows {
        w.write_record(row).map_err(CliError::csv)?;
    }
    let mut bytes = w.into_inner().map_err(|e| CliError::internal(e.to_string()))?;
    bytes.extend_from_slice(config.metadata_line().as_bytes());
    Ok(bytes)
}

/// Seventeen significant digits.
pub fn decimal(x: f64) -> String {
    format!("{x:.16e}")
}
