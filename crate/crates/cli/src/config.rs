use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use workbench_core::mirror::CyFamilyConfig;

use crate::error::{Result, WorkbenchError};

pub const MIN_ORDER: u32 = 5;
pub const MIN_PRECISION: u32 = 64;

/// Hodge sample grid: `count` points with `|z| < radius_fraction · R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    #[serde(default = "default_fraction")]
    pub radius_fraction: f64,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_fraction() -> f64 {
    0.5
}

fn default_count() -> usize {
    20
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            radius_fraction: default_fraction(),
            count: default_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative agreement of finite-difference and algebraic curvature.
    pub fd_relative: f64,
    pub fd_step: f64,
    /// Real sample point for the finite-difference check.
    pub fd_point: f64,
    /// Max-norm threshold for anomaly residuals.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            fd_relative: 1e-6,
            fd_step: 1e-10,
            fd_point: 1e-7,
            residual: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkbenchConfig {
    pub family: CyFamilyConfig,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default)]
    pub samples: SampleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_order() -> u32 {
    30
}

fn default_precision() -> u32 {
    256
}

impl WorkbenchConfig {
    pub fn quintic() -> Self {
        WorkbenchConfig {
            family: CyFamilyConfig::quintic(),
            order: default_order(),
            precision_bits: default_precision(),
            samples: SampleSpec::default(),
            output_dir: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: WorkbenchConfig =
            serde_json::from_str(text).map_err(|e| WorkbenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| WorkbenchError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < MIN_ORDER {
            return Err(WorkbenchError::Config(format!(
                "truncation order {} below minimum {MIN_ORDER}",
                self.order
            )));
        }
        if self.precision_bits < MIN_PRECISION {
            return Err(WorkbenchError::Config(format!(
                "precision {} bits below minimum {MIN_PRECISION}",
                self.precision_bits
            )));
        }
        let f = self.samples.radius_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(WorkbenchError::Config(format!("radius fraction {f} outside (0, 1)")));
        }
        if self.samples.count == 0 {
            return Err(WorkbenchError::Config("sample count must be positive".into()));
        }
        self.family
            .validate()
            .map_err(|e| WorkbenchError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let text = serde_json::to_string(&canonical).expect("serializable");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_roundtrip() {
        let cfg = WorkbenchConfig::quintic();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = WorkbenchConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn output_dir_does_not_change_hash() {
        let mut cfg = WorkbenchConfig::quintic();
        let h = cfg.hash();
        cfg.output_dir = Some("elsewhere".into());
        assert_eq!(cfg.hash(), h);
        cfg.order = 31;
        assert_ne!(cfg.hash(), h);
    }

    #[test]
    fn invariants() {
        let mut cfg = WorkbenchConfig::quintic();
        cfg.order = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = WorkbenchConfig::quintic();
        cfg.precision_bits = 32;
        assert!(cfg.validate().is_err());
        let mut cfg = WorkbenchConfig::quintic();
        cfg.samples.radius_fraction = 1.0;
        assert!(cfg.validate().is_err());
    }
}
