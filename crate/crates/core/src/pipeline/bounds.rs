//! Sample-complexity bounds for random Fourier features and their empirical
//! kernel counterparts.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::spectrum::{enumerate_canonical, FrequencyVector, SpectrumDescriptor};

/// Inputs to the feature-count bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Root-mean-square frequency norm.
    pub sigma_p: f64,
    /// Diameter of the input domain.
    pub ell: f64,
    pub lambda0: f64,
    /// Training-set size `M`; the ridge strength is `λ = M·λ₀`.
    pub m_train: usize,
    pub sigma_y2: f64,
    /// Placeholder constant; no value is known.
    pub c1: f64,
    /// Placeholder constant; no value is known.
    pub c2: f64,
    pub layers: usize,
    /// `|X|`.
    pub domain_size: f64,
}

impl BoundParams {
    /// `ℓ = 2π√d`, `λ = 100 · 0.01 = 1`, `C1 = C2 = 1`, one layer, `|X| = 1000`.
    pub fn new(d: usize, epsilon: f64, delta: f64, sigma_p: f64) -> Self {
        Self {
            d,
            epsilon,
            delta,
            sigma_p,
            ell: TAU * (d as f64).sqrt(),
            lambda0: 0.01,
            m_train: 100,
            sigma_y2: 1.0,
            c1: 1.0,
            c2: 1.0,
            layers: 1,
            domain_size: 1000.0,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.m_train as f64 * self.lambda0
    }

    pub fn sigma_ell(&self) -> f64 {
        self.sigma_p * self.ell
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.sigma_p >= 0.0 && self.sigma_p.is_finite()) {
            return bad(format!("sigma_p must be non-negative, got {}", self.sigma_p));
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return bad(format!("ell must be positive, got {}", self.ell));
        }
        Ok(())
    }
}

/// `β_d = ((d/2)^(−d/(d+2)) + (d/2)^(2/(d+2))) · 2^((6d+2)/(d+2))`.
pub fn beta_d(d: usize) -> f64 {
    let d = d as f64;
    let half = d / 2.0;
    (half.powf(-d / (d + 2.0)) + half.powf(2.0 / (d + 2.0))) * 2f64.powf((6.0 * d + 2.0) / (d + 2.0))
}

/// `min(1, kernel_sup_term + ε/3)`.
pub fn alpha_epsilon(epsilon: f64, kernel_sup_term: f64) -> f64 {
    (kernel_sup_term + epsilon / 3.0).min(1.0)
}

/// Probability bound on `sup |k − k̃| ≥ ε` with `D` features, unclipped.
pub fn failure_probability(d: usize, epsilon: f64, sigma_ell: f64, n_features: usize, alpha: f64) -> f64 {
    let df = d as f64;
    beta_d(d)
        * (sigma_ell / epsilon).powf(2.0 / (1.0 + 2.0 / df))
        * (-(n_features as f64) * epsilon * epsilon / (8.0 * (df + 2.0) * alpha)).exp()
}

/// [`failure_probability`] clipped to `[0, 1]`.
pub fn failure_probability_clipped(d: usize, epsilon: f64, sigma_ell: f64, n_features: usize, alpha: f64) -> f64 {
    failure_probability(d, epsilon, sigma_ell, n_features, alpha).clamp(0.0, 1.0)
}

/// Smallest `D` for which the kernel approximation is `ε`-uniform with
/// probability at least `1 − δ`.
pub fn min_features(p: &BoundParams, alpha: f64) -> Result<u64> {
    p.validate()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let sigma_ell = p.sigma_ell();
    if p.epsilon > sigma_ell {
        return Err(Error::DomainTooSmall { epsilon: p.epsilon, sigma_ell });
    }
    let d = p.d as f64;
    let eps = p.epsilon;
    let value = 8.0 * (d + 2.0) * alpha / (eps * eps)
        * ((2.0 / (1.0 + 2.0 / d)) * (sigma_ell / eps).ln() + (beta_d(p.d) / p.delta).ln());
    Ok(value.ceil().max(1.0) as u64)
}

/// Order-of-magnitude feature count for ridge regression on Pauli-encoded
/// models, with `C1`, `C2` taken from `p`.
pub fn lrr_features(p: &BoundParams) -> Result<u64> {
    p.validate()?;
    let lambda = p.lambda();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if !(p.c1 > 0.0 && p.c2 > 0.0) {
        return Err(Error::InvalidParameter("C1 and C2 must be positive".into()));
    }
    if p.layers == 0 || !(p.domain_size >= 1.0) {
        return Err(Error::InvalidParameter("layers and |X| must be at least 1".into()));
    }
    let d = p.d as f64;
    let l = p.layers as f64;
    let eps = p.epsilon;
    let scale = d * p.c1 * (1.0 + lambda).powi(2) / (lambda.powi(4) * eps * eps);
    let logs = (d * l * l * p.domain_size).ln() + (p.c2 * (1.0 + lambda) / (lambda * lambda) - p.delta.ln()).ln();
    let value = scale * logs;
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidParameter(format!("bound evaluates to {value}")));
    }
    Ok(value.ceil() as u64)
}

/// Lattice kernel `k(z)`: mean of `cos(ω·z)` over a frequency set.
pub fn lattice_kernel(freqs: &[FrequencyVector], z: &[f64]) -> f64 {
    freqs.iter().map(|w| w.dot(z).cos()).sum::<f64>() / freqs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSup {
    /// Empirical sup of `½ + ½k(2x, 2y) − k(x, y)`.
    pub kernel_sup_term: f64,
    /// Empirical sup of `|k(x − y) − k̃(x − y)|`.
    pub sup_kernel_error: f64,
}

/// Compares the full-lattice kernel with the sampled one at `trial_points`
/// random pairs in `[0, 2π)^d × [0, 2π)^d`.
pub fn empirical_kernel_sup(
    desc: &SpectrumDescriptor,
    sample: &[FrequencyVector],
    trial_points: usize,
    seed: u64,
    cap: u64,
) -> Result<KernelSup> {
    if sample.is_empty() {
        return Err(Error::EmptyInput("frequency sample"));
    }
    if trial_points == 0 {
        return Err(Error::InvalidParameter("trial_points must be positive".into()));
    }
    if let Some(bad) = sample.iter().find(|w| w.dim() != desc.dim()) {
        return Err(Error::DimensionMismatch { expected: desc.dim(), got: bad.dim() });
    }
    let full = enumerate_canonical(desc, cap)?;
    if full.is_empty() {
        return Err(Error::EmptyInput("canonical lattice"));
    }
    let mut rng = seed::rng(seed);
    let mut out = KernelSup { kernel_sup_term: f64::NEG_INFINITY, sup_kernel_error: 0.0 };
    for _ in 0..trial_points {
        let z: Vec<f64> = (0..desc.dim())
            .map(|_| rng.random_range(0.0..TAU) - rng.random_range(0.0..TAU))
            .collect();
        let z2: Vec<f64> = z.iter().map(|v| 2.0 * v).collect();
        let k = lattice_kernel(&full, &z);
        let term = 0.5 + 0.5 * lattice_kernel(&full, &z2) - k;
        out.kernel_sup_term = out.kernel_sup_term.max(term);
        out.sup_kernel_error = out.sup_kernel_error.max((k - lattice_kernel(sample, &z)).abs());
    }
    Ok(out)
}
