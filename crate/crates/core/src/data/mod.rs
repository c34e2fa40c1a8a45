//! Datasets, preprocessing transforms with replayable provenance, synthetic
//! generators and splits.

mod csv_io;
mod dbscan;
mod pca;
mod synth;
mod transforms;

pub use csv_io::*;
pub use dbscan::*;
pub use pca::*;
pub use synth::*;
pub use transforms::*;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One recorded step in a dataset's history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    LoadCsv { path: String, target_column: String, rows_read: usize, rows_dropped: usize },
    Synth { spec: SynthSpec },
    Normalize { min: Vec<f64>, max: Vec<f64> },
    RescaleTargets { min: f64, max: f64 },
    Pca(PcaParams),
    Dbscan { eps: f64, min_pts: usize, kept: Vec<usize> },
    Subset { rows: Vec<usize> },
}

impl Transform {
    /// Source entries describe where raw data came from and are not replayed.
    pub fn is_source(&self) -> bool {
        matches!(self, Transform::LoadCsv { .. } | Transform::Synth { .. })
    }

    fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        match self {
            Transform::LoadCsv { .. } | Transform::Synth { .. } => Ok(ds.clone()),
            Transform::Normalize { min, max } => apply_normalize(ds, min, max),
            Transform::RescaleTargets { min, max } => Ok(apply_rescale(ds, *min, *max)),
            Transform::Pca(p) => apply_pca(ds, p),
            Transform::Dbscan { kept, .. } | Transform::Subset { rows: kept } => ds.select(kept),
        }
        .map(|mut out| {
            out.provenance.push(self.clone());
            out
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub target_name: String,
    /// Row-major samples.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub provenance: Vec<Transform>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, target_name: String, x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        let ds = Self { feature_names, target_name, x, y, provenance: Vec::new() };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::DimensionMismatch { expected: self.x.len(), got: self.y.len() });
        }
        let cols = self.feature_names.len();
        if let Some(row) = self.x.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.iter().map(|r| r[j]).collect()
    }

    /// Rows in the given order; provenance is copied unchanged.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows()) {
            return Err(Error::InvalidParameter(format!("row {bad} out of range for {} rows", self.n_rows())));
        }
        Ok(Self {
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            x: rows.iter().map(|&r| self.x[r].clone()).collect(),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            provenance: self.provenance.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let ds: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        ds.validate()?;
        Ok(ds)
    }
}

/// Re-applies every non-source step of `transforms` to `raw`.
pub fn replay(raw: &Dataset, transforms: &[Transform]) -> Result<Dataset> {
    transforms
        .iter()
        .filter(|t| !t.is_source())
        .try_fold(raw.clone(), |ds, t| t.apply(&ds))
}
