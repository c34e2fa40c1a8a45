use rand::seq::SliceRandom;

use super::{Dataset, Transform};
use crate::error::{Error, Result};
use crate::seed;

fn require_rows(ds: &Dataset) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    Ok(())
}

/// Min-max scales every feature to `[0, 1]`; constant columns become 0.
pub fn normalize(ds: &Dataset) -> Result<Dataset> {
    require_rows(ds)?;
    let cols = ds.n_features();
    let mut min = vec![f64::INFINITY; cols];
    let mut max = vec![f64::NEG_INFINITY; cols];
    for row in &ds.x {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Transform::Normalize { min, max }.apply(ds)
}

pub(super) fn apply_normalize(ds: &Dataset, min: &[f64], max: &[f64]) -> Result<Dataset> {
    if min.len() != ds.n_features() || max.len() != ds.n_features() {
        return Err(Error::DimensionMismatch { expected: ds.n_features(), got: min.len() });
    }
    let mut out = ds.clone();
    for row in &mut out.x {
        for (j, v) in row.iter_mut().enumerate() {
            let span = max[j] - min[j];
            *v = if span > 0.0 { ((*v - min[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
        }
    }
    Ok(out)
}

/// Maps targets affinely onto `[−1, 1]`; constant targets become 0.
pub fn rescale_targets(ds: &Dataset) -> Result<Dataset> {
    require_rows(ds)?;
    let min = ds.y.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ds.y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Transform::RescaleTargets { min, max }.apply(ds)
}

pub(super) fn apply_rescale(ds: &Dataset, min: f64, max: f64) -> Dataset {
    let mut out = ds.clone();
    let span = max - min;
    for v in &mut out.y {
        *v = if span > 0.0 { (2.0 * (*v - min) / span - 1.0).clamp(-1.0, 1.0) } else { 0.0 };
    }
    out
}

/// Inverse of [`rescale_targets`] for a single value.
pub fn unscale_target(value: f64, min: f64, max: f64) -> f64 {
    (value + 1.0) / 2.0 * (max - min) + min
}

/// Seeded shuffle split with `round(fraction · n)` training rows.
pub fn train_test_split(ds: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("split fraction must lie in (0, 1), got {fraction}")));
    }
    let n = ds.n_rows();
    let n_train = (fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::InvalidParameter(format!(
            "split of {n} rows at {fraction} leaves one side empty"
        )));
    }
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut seed::rng(seed));
    let (train, test) = rows.split_at(n_train);
    Ok((
        Transform::Subset { rows: train.to_vec() }.apply(ds)?,
        Transform::Subset { rows: test.to_vec() }.apply(ds)?,
    ))
}
