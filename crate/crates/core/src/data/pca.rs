use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{Dataset, Transform};
use crate::error::{Error, Result};

/// Fitted projection, enough to replay it on the same input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaParams {
    pub mean: Vec<f64>,
    /// `k` rows of unit loadings, largest-magnitude entry positive.
    pub components: Vec<Vec<f64>>,
    /// Variance fraction per component, non-increasing.
    pub explained_variance_ratio: Vec<f64>,
    /// Per-component score range used to rescale outputs to `[0, 1]`.
    pub score_min: Vec<f64>,
    pub score_max: Vec<f64>,
}

/// Eigen-decomposition of the sample covariance.
#[derive(Debug, Clone)]
pub struct PcaFit {
    pub mean: Vec<f64>,
    /// All components, ordered by descending eigenvalue.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
}

impl PcaFit {
    /// Centered scores on the first `k` components.
    pub fn project(&self, x: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
        project(x, &self.mean, &self.components[..k])
    }
}

pub fn pca_fit(ds: &Dataset) -> Result<PcaFit> {
    if ds.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let (n, c) = (ds.n_rows(), ds.n_features());
    if c == 0 {
        return Err(Error::EmptyInput("feature columns"));
    }
    let mean: Vec<f64> = (0..c).map(|j| ds.x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let centered = DMatrix::from_fn(n, c, |i, j| ds.x[i][j] - mean[j]);
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let cov = (centered.transpose() * &centered) / denom;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let components: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let v: Vec<f64> = eig.eigenvectors.column(i).iter().cloned().collect();
            let lead = v.iter().cloned().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if lead < 0.0 {
                v.into_iter().map(|x| -x).collect()
            } else {
                v
            }
        })
        .collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained_variance_ratio = eigenvalues
        .iter()
        .map(|&l| if total > 0.0 { l / total } else { 1.0 / c as f64 })
        .collect();
    Ok(PcaFit { mean, components, eigenvalues, explained_variance_ratio })
}

fn project(x: &[Vec<f64>], mean: &[f64], components: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| {
            components
                .iter()
                .map(|v| row.iter().zip(mean).zip(v).map(|((a, m), w)| (a - m) * w).sum())
                .collect()
        })
        .collect()
}

/// Projects onto the top `k` principal components and rescales each score
/// column to `[0, 1]`.
pub fn pca(ds: &Dataset, k: usize) -> Result<Dataset> {
    if k == 0 || k > ds.n_features() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in [1, {}], got {k}",
            ds.n_features()
        )));
    }
    let fit = pca_fit(ds)?;
    let components = fit.components[..k].to_vec();
    let scores = project(&ds.x, &fit.mean, &components);
    let score_min = (0..k).map(|j| scores.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).collect();
    let score_max = (0..k).map(|j| scores.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let params = PcaParams {
        mean: fit.mean,
        components,
        explained_variance_ratio: fit.explained_variance_ratio[..k].to_vec(),
        score_min,
        score_max,
    };
    Transform::Pca(params).apply(ds)
}

pub(super) fn apply_pca(ds: &Dataset, p: &PcaParams) -> Result<Dataset> {
    if p.mean.len() != ds.n_features() {
        return Err(Error::DimensionMismatch { expected: p.mean.len(), got: ds.n_features() });
    }
    let scores = project(&ds.x, &p.mean, &p.components);
    let x = scores
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(j, s)| {
                    let span = p.score_max[j] - p.score_min[j];
                    if span > 0.0 { ((s - p.score_min[j]) / span).clamp(0.0, 1.0) } else { 0.0 }
                })
                .collect()
        })
        .collect();
    Ok(Dataset {
        feature_names: (0..p.components.len()).map(|j| format!("pc{j}")).collect(),
        target_name: ds.target_name.clone(),
        x,
        y: ds.y.clone(),
        provenance: ds.provenance.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn ds(x: Vec<Vec<f64>>) -> Dataset {
        let c = x[0].len();
        let y = vec![0.0; x.len()];
        Dataset::new((0..c).map(|j| format!("f{j}")).collect(), "y".into(), x, y).unwrap()
    }

    #[test]
    fn rank_one_data() {
        let d = ds((0..20).map(|i| vec![i as f64, 2.0 * i as f64]).collect());
        let out = pca(&d, 1).unwrap();
        let Transform::Pca(p) = out.provenance.last().unwrap() else { panic!() };
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-12);
        assert!(p.components[0].iter().all(|&w| w > 0.0));
        assert!(out.x.iter().all(|r| (0.0..=1.0).contains(&r[0])));
    }

    #[test]
    fn full_rank_totals_one_and_orders() {
        let mut rng = crate::seed::rng(5);
        let d = ds((0..300)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                vec![3.0 * a, a + 0.5 * b, rng.sample(StandardNormal)]
            })
            .collect());
        let fit = pca_fit(&d).unwrap();
        let r = &fit.explained_variance_ratio;
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(r.windows(2).all(|w| w[0] >= w[1]));
        let scores = fit.project(&d.x, 3);
        let centered: Vec<Vec<f64>> = d.x.iter().map(|row| row.iter().zip(&fit.mean).map(|(a, m)| a - m).collect()).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        for i in 0..20 {
            for j in 0..20 {
                assert!((dot(&scores[i], &scores[j]) - dot(&centered[i], &centered[j])).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn isotropic_gaussian_splits_evenly() {
        let mut rng = crate::seed::rng(9);
        let dim = 4;
        let d = ds((0..10_000).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect());
        let fit = pca_fit(&d).unwrap();
        assert!((fit.explained_variance_ratio[0] - 1.0 / dim as f64).abs() < 0.05);
    }

    #[test]
    fn k_out_of_range() {
        let d = ds(vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert!(pca(&d, 0).is_err());
        assert!(pca(&d, 3).is_err());
    }
}
