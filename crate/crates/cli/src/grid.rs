//! File-level front ends for the anomaly checks.

use std::path::Path;

use workbench_core::anomaly::{genus2_integrate, AnomalyGrid, PropagatorSpec, Residual};

use crate::error::{Result, WorkbenchError};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn from_residual(r: &Residual, tolerance: f64) -> Self {
        CheckOutcome {
            max: r.max,
            mean: r.mean,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.max < self.tolerance
    }

    /// Numeric failure when the residual exceeds the tolerance.
    pub fn into_result(self, stage: &'static str) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(WorkbenchError::Numeric {
                stage,
                message: format!("residual max {:e} exceeds tolerance {:e}", self.max, self.tolerance),
            })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| WorkbenchError::io(path, e))
}

pub fn load_grid(path: &Path) -> Result<AnomalyGrid> {
    AnomalyGrid::from_json(&read(path)?).map_err(|e| WorkbenchError::from_anomaly("ingest", e))
}

pub fn hae_check(path: &Path, genus: u32, tolerance: f64) -> Result<CheckOutcome> {
    let grid = load_grid(path)?;
    let r = grid
        .hae_residual(genus)
        .map_err(|e| WorkbenchError::from_anomaly("hae-check", e))?;
    Ok(CheckOutcome::from_residual(&r, tolerance))
}

pub fn ehae_check(path: &Path, genus: u32, holes: u32, tolerance: f64) -> Result<CheckOutcome> {
    let grid = load_grid(path)?;
    let r = grid
        .ehae_residual(genus, holes)
        .map_err(|e| WorkbenchError::from_anomaly("ehae-check", e))?;
    Ok(CheckOutcome::from_residual(&r, tolerance))
}

/// Integrates `F_2` and writes the grid with the new field to `out`.
pub fn genus2(grid_path: &Path, propagator_path: &Path, tolerance: f64, out: &Path) -> Result<CheckOutcome> {
    let stage = "genus2";
    let grid = load_grid(grid_path)?;
    let prop = PropagatorSpec::from_json(&read(propagator_path)?)
        .map_err(|e| WorkbenchError::from_anomaly(stage, e))?;
    let f2 = genus2_integrate(&grid, &prop, prop.ambiguity.as_deref(), tolerance).map_err(|e| WorkbenchError::from_anomaly(stage, e))?;
    let grid = grid
        .with_field("F2", f2)
        .map_err(|e| WorkbenchError::from_anomaly(stage, e))?;
    let r = grid.hae_residual(2).map_err(|e| WorkbenchError::from_anomaly(stage, e))?;
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir).map_err(|e| WorkbenchError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(&grid.to_json()).expect("serializable");
    std::fs::write(out, text + "\n").map_err(|e| WorkbenchError::io(out, e))?;
    Ok(CheckOutcome::from_residual(&r, tolerance))
}
