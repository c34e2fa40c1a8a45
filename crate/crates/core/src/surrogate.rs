//! Fourier design matrices, the pseudoinverse fit, and the deployable
//! classical surrogate
//! `s(x) = c₀ + Σ_ω a_ω cos(ω·x) + b_ω sin(ω·x)`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Scalar};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq_pinv, LstsqSolution};
use crate::spectrum::{FrequencyVector, SpectrumDescriptor};

/// Imaginary leakage above this level in a complex fit of real data is logged.
pub const LEAKAGE_WARN_LEVEL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// One column `exp(−i ω·x)` per frequency.
    ComplexExponential,
    /// `[1, cos ω₁·x, sin ω₁·x, …]`.
    RealTrig,
}

#[derive(Debug, Clone)]
pub struct DesignMatrix<T: Scalar> {
    pub entries: DMatrix<T>,
    pub basis: Basis,
    pub frequencies: Vec<FrequencyVector>,
}

impl<T: Scalar> DesignMatrix<T> {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }
}

fn check_points(points: &[Vec<f64>], dim: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput("sample points"));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample points"));
        }
    }
    Ok(())
}

fn common_dim(freqs: &[FrequencyVector]) -> Result<usize> {
    let dim = freqs.first().ok_or(Error::EmptyInput("frequencies"))?.dim();
    if let Some(bad) = freqs.iter().find(|f| f.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
    }
    Ok(dim)
}

/// Entry `(j, k) = exp(−i ω_k·x_j)`.
pub fn build_complex_design(points: &[Vec<f64>], freqs: &[FrequencyVector]) -> Result<DesignMatrix<Complex64>> {
    let dim = common_dim(freqs)?;
    check_points(points, dim)?;
    let rows: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|x| freqs.iter().map(|w| Complex64::from_polar(1.0, -w.dot(x))).collect())
        .collect();
    let entries = DMatrix::from_row_iterator(points.len(), freqs.len(), rows.into_iter().flatten());
    Ok(DesignMatrix { entries, basis: Basis::ComplexExponential, frequencies: freqs.to_vec() })
}

/// Columns `[1, cos(ω₁·x), sin(ω₁·x), …, cos(ω_D·x), sin(ω_D·x)]`.
///
/// The `1/√D` scale of the random feature map is absorbed by the fitted
/// coefficients.
pub fn build_real_design(points: &[Vec<f64>], freqs: &[FrequencyVector]) -> Result<DesignMatrix<f64>> {
    let dim = common_dim(freqs)?;
    if let Some(bad) = freqs.iter().find(|f| f.is_zero() || !f.is_canonical()) {
        return Err(Error::NonCanonicalFrequency(bad.0.clone()));
    }
    check_points(points, dim)?;
    let as_f64: Vec<Vec<f64>> = freqs.iter().map(|w| w.0.iter().map(|&c| c as f64).collect()).collect();
    let entries = real_trig_matrix(points, &as_f64);
    Ok(DesignMatrix { entries, basis: Basis::RealTrig, frequencies: freqs.to_vec() })
}

fn real_trig_matrix(points: &[Vec<f64>], freqs: &[Vec<f64>]) -> DMatrix<f64> {
    let cols = 1 + 2 * freqs.len();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| {
            let mut row = Vec::with_capacity(cols);
            row.push(1.0);
            for w in freqs {
                let phase: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
                let (s, c) = phase.sin_cos();
                row.push(c);
                row.push(s);
            }
            row
        })
        .collect();
    DMatrix::from_row_iterator(points.len(), cols, rows.into_iter().flatten())
}

#[derive(Debug, Clone)]
pub struct Fit<T> {
    pub coefficients: Vec<T>,
    pub residual: f64,
    pub rank: usize,
}

fn fit_generic<T>(entries: &DMatrix<T>, y: DVector<T>, rcond: f64) -> Result<Fit<T>>
where
    T: crate::linalg::SolveScalar,
{
    let LstsqSolution { coefficients, residual, rank, .. } = lstsq_pinv(entries, &y, rcond)?;
    Ok(Fit { coefficients: coefficients.iter().cloned().collect(), residual, rank })
}

/// Minimum-norm least squares on a real design.
pub fn fit_real(design: &DesignMatrix<f64>, y: &[f64], rcond: f64) -> Result<Fit<f64>> {
    if y.len() != design.rows() {
        return Err(Error::DimensionMismatch { expected: design.rows(), got: y.len() });
    }
    fit_generic(&design.entries, DVector::from_column_slice(y), rcond)
}

/// Minimum-norm least squares on a complex-exponential design with real targets.
pub fn fit_complex(design: &DesignMatrix<Complex64>, y: &[f64], rcond: f64) -> Result<Fit<Complex64>> {
    if y.len() != design.rows() {
        return Err(Error::DimensionMismatch { expected: design.rows(), got: y.len() });
    }
    let y = DVector::from_iterator(y.len(), y.iter().map(|&v| Complex64::new(v, 0.0)));
    fit_generic(&design.entries, y, rcond)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurrogateMode {
    Exact,
    Rff,
}

impl fmt::Display for SurrogateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurrogateMode::Exact => "exact",
            SurrogateMode::Rff => "rff",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub freq: FrequencyVector,
    pub a: f64,
    pub b: f64,
}

/// Truncated real Fourier series fitted to a quantum model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub d: usize,
    pub omega_max: SpectrumDescriptor,
    pub intercept: f64,
    pub terms: Vec<FourierTerm>,
    pub mode: SurrogateMode,
    pub residual: f64,
    /// Fingerprint of the circuit and angles the model was extracted from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl SurrogateModel {
    /// Packs a real-design fit (`[c₀, a₁, b₁, …]`).
    pub fn from_real_fit(
        design: &DesignMatrix<f64>,
        fit: &Fit<f64>,
        omega_max: SpectrumDescriptor,
        mode: SurrogateMode,
    ) -> Result<Self> {
        if design.basis != Basis::RealTrig || fit.coefficients.len() != design.cols() {
            return Err(Error::ShapeMismatch("fit does not belong to a real-trig design".into()));
        }
        let c = &fit.coefficients;
        let terms = design
            .frequencies
            .iter()
            .enumerate()
            .map(|(k, w)| FourierTerm { freq: w.clone(), a: c[1 + 2 * k], b: c[2 + 2 * k] })
            .collect();
        Ok(Self {
            d: omega_max.dim(),
            omega_max,
            intercept: c[0],
            terms,
            mode,
            residual: fit.residual,
            source: None,
        })
    }

    /// Converts a complex-exponential fit into real storage.
    ///
    /// For canonical `ω`, `a_ω = Re(c_ω + c_{−ω})` and `b_ω = Im(c_ω − c_{−ω})`,
    /// which is `2·Re c_ω` and `2·Im c_ω` on conjugate-symmetric fits. The
    /// resulting model equals the real part of the complex series.
    pub fn from_complex_fit(
        design: &DesignMatrix<Complex64>,
        fit: &Fit<Complex64>,
        omega_max: SpectrumDescriptor,
        mode: SurrogateMode,
    ) -> Result<Self> {
        if design.basis != Basis::ComplexExponential || fit.coefficients.len() != design.cols() {
            return Err(Error::ShapeMismatch("fit does not belong to a complex design".into()));
        }
        let by_freq: HashMap<&FrequencyVector, Complex64> =
            design.frequencies.iter().zip(fit.coefficients.iter().copied()).collect();
        let zero = Complex64::new(0.0, 0.0);

        let mut leakage = 0.0_f64;
        let mut intercept = 0.0;
        let mut terms = Vec::new();
        for w in &design.frequencies {
            let c = by_freq[w];
            if w.is_zero() {
                intercept = c.re;
                leakage = leakage.max(c.im.abs());
            } else if w.is_canonical() {
                let partner = by_freq.get(&w.negated()).copied().unwrap_or(zero);
                leakage = leakage.max((c - partner.conj()).norm());
                terms.push(FourierTerm { freq: w.clone(), a: c.re + partner.re, b: c.im - partner.im });
            } else if !by_freq.contains_key(&w.canonical()) {
                // Lone non-canonical column: fold onto its canonical partner.
                leakage = leakage.max(c.norm());
                terms.push(FourierTerm { freq: w.canonical(), a: c.re, b: -c.im });
            }
        }
        if leakage > LEAKAGE_WARN_LEVEL {
            tracing::warn!(leakage, "complex fit is not conjugate-symmetric; imaginary part dropped");
        }
        Ok(Self {
            d: omega_max.dim(),
            omega_max,
            intercept,
            terms,
            mode,
            residual: fit.residual,
            source: None,
        })
    }

    pub fn n_frequencies(&self) -> usize {
        self.terms.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .terms
                .iter()
                .map(|t| {
                    let (s, c) = t.freq.dot(x).sin_cos();
                    t.a * c + t.b * s
                })
                .sum::<f64>()
    }

    pub fn predict_many(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        points.iter().map(|x| self.predict(x)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Mean squared error of `model` on `(points, targets)`.
pub fn mse(model: &SurrogateModel, points: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("evaluation set"));
    }
    if points.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), got: targets.len() });
    }
    let preds = model.predict_many(points)?;
    Ok(mean_squared_error(&preds, targets))
}

/// `sup_x |oracle(x) − model(x)|` over `points`.
pub fn sup_error<F>(model: &SurrogateModel, oracle: F, points: &[Vec<f64>]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if points.is_empty() {
        return Err(Error::EmptyInput("evaluation set"));
    }
    let mut worst = 0.0_f64;
    for x in points {
        worst = worst.max((oracle(x)? - model.predict(x)?).abs());
    }
    Ok(worst)
}

pub fn mean_squared_error(preds: &[f64], targets: &[f64]) -> f64 {
    preds.iter().zip(targets).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / preds.len() as f64
}

/// `mse_surrogate / mse_quantum − 1`.
pub fn relative_mse_deviation(surrogate_mse: f64, quantum_mse: f64) -> f64 {
    (surrogate_mse - quantum_mse) / quantum_mse
}

/// Surrogate over real-valued frequencies, used to compare against the
/// integer-lattice sampler. Not a deployable artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSurrogate {
    pub frequencies: Vec<Vec<f64>>,
    pub intercept: f64,
    pub coefficients: Vec<(f64, f64)>,
    pub residual: f64,
}

impl ContinuousSurrogate {
    pub fn fit(points: &[Vec<f64>], y: &[f64], frequencies: Vec<Vec<f64>>, rcond: f64) -> Result<Self> {
        let dim = frequencies.first().ok_or(Error::EmptyInput("frequencies"))?.len();
        check_points(points, dim)?;
        if y.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: y.len() });
        }
        let design = real_trig_matrix(points, &frequencies);
        let fit = fit_generic(&design, DVector::from_column_slice(y), rcond)?;
        let c = fit.coefficients;
        Ok(Self {
            intercept: c[0],
            coefficients: (0..frequencies.len()).map(|k| (c[1 + 2 * k], c[2 + 2 * k])).collect(),
            frequencies,
            residual: fit.residual,
        })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .frequencies
                .iter()
                .zip(&self.coefficients)
                .map(|(w, (a, b))| {
                    let (s, c) = w.iter().zip(x).map(|(p, q)| p * q).sum::<f64>().sin_cos();
                    a * c + b * s
                })
                .sum::<f64>()
    }
}
