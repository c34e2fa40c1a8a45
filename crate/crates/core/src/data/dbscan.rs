use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dataset, Transform};
use crate::error::{Error, Result};

pub const NOISE: i64 = -1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanResult {
    /// Cluster id per input row, or [`NOISE`].
    pub labels: Vec<i64>,
    pub n_clusters: usize,
    pub n_noise: usize,
    /// Input rows with noise removed.
    pub dataset: Dataset,
}

fn dist_sqr(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Cluster labels by density reachability. Neighbourhoods are closed balls of
/// radius `eps` and include the point itself.
pub fn dbscan_labels(x: &[Vec<f64>], eps: f64, min_pts: usize) -> Result<Vec<i64>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::InvalidParameter("min_pts must be at least 1".into()));
    }
    let eps2 = eps * eps;
    let neighbours: Vec<Vec<usize>> = x
        .par_iter()
        .map(|p| (0..x.len()).filter(|&j| dist_sqr(p, &x[j]) <= eps2).collect())
        .collect();
    let core: Vec<bool> = neighbours.iter().map(|n| n.len() >= min_pts).collect();

    const UNSEEN: i64 = i64::MIN;
    let mut labels = vec![UNSEEN; x.len()];
    let mut next_cluster = 0;
    for i in 0..x.len() {
        if labels[i] != UNSEEN {
            continue;
        }
        if !core[i] {
            labels[i] = NOISE;
            continue;
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[i] = cluster;
        let mut queue: VecDeque<usize> = neighbours[i].iter().cloned().collect();
        while let Some(j) = queue.pop_front() {
            if labels[j] == NOISE {
                labels[j] = cluster;
            }
            if labels[j] != UNSEEN {
                continue;
            }
            labels[j] = cluster;
            if core[j] {
                queue.extend(neighbours[j].iter().cloned());
            }
        }
    }
    Ok(labels)
}

/// Labels rows and drops noise.
pub fn dbscan(ds: &Dataset, eps: f64, min_pts: usize) -> Result<DbscanResult> {
    let labels = dbscan_labels(&ds.x, eps, min_pts)?;
    let kept: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] != NOISE).collect();
    let n_clusters = labels.iter().cloned().max().map_or(0, |m| (m + 1).max(0) as usize);
    let n_noise = labels.len() - kept.len();
    let dataset = Transform::Dbscan { eps, min_pts, kept }.apply(ds)?;
    Ok(DbscanResult { labels, n_clusters, n_noise, dataset })
}
