//! Run configuration loaded from `--config` and overridden by flags.

use std::path::Path;

use kzlie::alphabet::DEFAULT_LYNDON_CAP;
use kzlie::chen::QuadratureConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Default truncation degree.
    pub cap: usize,
    /// Target tolerance for series and quadrature.
    pub tol: f64,
    /// Pass threshold for numeric residual checks.
    pub check_tol: f64,
    /// Largest accepted truncation degree.
    pub max_cap: usize,
    /// Largest number of Lyndon words an enumeration may produce.
    pub lyndon_cap: u64,
    pub quadrature: QuadratureConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cap: 3,
            tol: 1e-10,
            check_tol: 1e-6,
            max_cap: 8,
            lyndon_cap: DEFAULT_LYNDON_CAP,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.cap == 0 || self.max_cap == 0 || self.lyndon_cap == 0 {
            return Err(CliError::Usage("cap, max_cap and lyndon_cap must be positive".into()));
        }
        if !(self.tol > 0.0) || !(self.check_tol > 0.0) {
            return Err(CliError::Usage("tol and check_tol must be positive".into()));
        }
        self.quadrature.validate().map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Requested cap, falling back to the default, within `max_cap`.
    pub fn cap(&self, requested: Option<usize>) -> Result<usize, CliError> {
        let cap = requested.unwrap_or(self.cap);
        if cap > self.max_cap {
            return Err(kzlie::Error::Resource(format!("cap {cap} exceeds max_cap {}", self.max_cap)).into());
        }
        Ok(cap)
    }

    pub fn quad(&self) -> QuadratureConfig {
        self.quadrature
    }
}
