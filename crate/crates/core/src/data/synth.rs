use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, Transform};
use crate::error::{Error, Result};
use crate::qsim::{expectation_unchecked, CircuitConfig, NoiseConfig, ParameterSet};
use crate::seed;
use crate::spectrum::{canonical_count, sample_distinct, SpectrumDescriptor};
use crate::surrogate::FourierTerm;

/// Most terms a synthetic trigonometric polynomial carries.
pub const TRIG_POLY_MAX_TERMS: usize = 16;
/// Per-feature frequency bound of synthetic trigonometric polynomials.
pub const TRIG_POLY_OMEGA_MAX: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SynthKind {
    TrigPoly,
    Circuit { n_qubits: usize, n_layers: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub d: usize,
    pub size: usize,
    pub kind: SynthKind,
    pub seed: u64,
    pub noise_sd: f64,
}

/// Noise-free target function of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroundTruth {
    /// `scale · (c₀ + Σ a cos(ω·x) + b sin(ω·x)) + offset`.
    TrigPoly { intercept: f64, terms: Vec<FourierTerm>, scale: f64, offset: f64 },
    Circuit { config: CircuitConfig, params: ParameterSet },
}

impl GroundTruth {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            GroundTruth::TrigPoly { intercept, terms, scale, offset } => scale * raw_poly(*intercept, terms, x) + offset,
            GroundTruth::Circuit { config, params } => {
                expectation_unchecked(config, params, x, &NoiseConfig::noiseless())
            }
        }
    }
}

fn raw_poly(intercept: f64, terms: &[FourierTerm], x: &[f64]) -> f64 {
    intercept
        + terms
            .iter()
            .map(|t| {
                let (s, c) = t.freq.dot(x).sin_cos();
                t.a * c + t.b * s
            })
            .sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub dataset: Dataset,
    pub truth: GroundTruth,
}

/// Inputs uniform on `[0, 1]^d`; targets from a random trigonometric
/// polynomial mapped onto `[−1, 1]` or from a random circuit, plus Gaussian
/// noise of standard deviation `noise_sd`.
pub fn synth_generate(spec: &SynthSpec) -> Result<SynthOutput> {
    if spec.d == 0 || spec.size == 0 {
        return Err(Error::InvalidParameter("d and size must be positive".into()));
    }
    if !(spec.noise_sd >= 0.0 && spec.noise_sd.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise_sd must be non-negative, got {}", spec.noise_sd)));
    }
    let mut x_rng = seed::rng(seed::derive(spec.seed, 0));
    let x: Vec<Vec<f64>> = (0..spec.size).map(|_| (0..spec.d).map(|_| x_rng.random::<f64>()).collect()).collect();

    let truth = match &spec.kind {
        SynthKind::TrigPoly => trig_poly_truth(spec.d, spec.seed, &x)?,
        SynthKind::Circuit { n_qubits, n_layers } => {
            let config = CircuitConfig::new(*n_qubits, *n_layers, spec.d)?;
            let params = ParameterSet::random(&config, seed::derive(spec.seed, 1));
            GroundTruth::Circuit { config, params }
        }
    };

    let mut noise_rng = seed::rng(seed::derive(spec.seed, 3));
    let clamp = matches!(spec.kind, SynthKind::Circuit { .. });
    let y = x
        .iter()
        .map(|xi| {
            let clean = truth.evaluate(xi);
            if spec.noise_sd == 0.0 {
                return clean;
            }
            let eta: f64 = noise_rng.sample(StandardNormal);
            let v = clean + spec.noise_sd * eta;
            if clamp { v.clamp(-1.0, 1.0) } else { v }
        })
        .collect();

    let names = (0..spec.d).map(|j| format!("x{j}")).collect();
    let mut dataset = Dataset::new(names, "y".into(), x, y)?;
    dataset.provenance.push(Transform::Synth { spec: spec.clone() });
    Ok(SynthOutput { dataset, truth })
}

fn trig_poly_truth(d: usize, base: u64, x: &[Vec<f64>]) -> Result<GroundTruth> {
    let desc = SpectrumDescriptor { omega_max: vec![TRIG_POLY_OMEGA_MAX; d] };
    let k = canonical_count(&desc).to_usize().unwrap_or(usize::MAX).min(TRIG_POLY_MAX_TERMS);
    let freqs = sample_distinct(&desc, k, seed::derive(base, 1))?;
    let mut rng = seed::rng(seed::derive(base, 2));
    let intercept: f64 = rng.sample(StandardNormal);
    let terms: Vec<FourierTerm> = freqs
        .into_iter()
        .map(|freq| FourierTerm { freq, a: rng.sample(StandardNormal), b: rng.sample(StandardNormal) })
        .collect();
    let raw: Vec<f64> = x.iter().map(|xi| raw_poly(intercept, &terms, xi)).collect();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (scale, offset) = if hi > lo {
        let s = 2.0 / (hi - lo);
        (s, -1.0 - s * lo)
    } else {
        (0.0, 0.0)
    };
    Ok(GroundTruth::TrigPoly { intercept, terms, scale, offset })
}
