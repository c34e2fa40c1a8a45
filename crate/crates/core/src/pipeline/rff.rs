//! Random-Fourier-feature surrogation: fit a sampled set of lattice
//! frequencies to the model's outputs on the training inputs.

use crate::error::{Error, Result};
use crate::qsim::{fingerprint, CircuitConfig, NoiseConfig, ParameterSet};
use crate::spectrum::{omega_max_of, sample_continuous, sample_distinct, FrequencyVector, SpectrumDescriptor};
use crate::surrogate::{build_real_design, fit_real, ContinuousSurrogate, SurrogateMode, SurrogateModel};

use super::evaluate_model;

/// Fits `[1 | cos | sin]` features for the given canonical frequencies.
pub fn fit_frequencies(
    points: &[Vec<f64>],
    targets: &[f64],
    desc: &SpectrumDescriptor,
    freqs: &[FrequencyVector],
    rcond: f64,
) -> Result<SurrogateModel> {
    if points.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), got: targets.len() });
    }
    if let Some(bad) = freqs.iter().find(|w| !desc.contains(w)) {
        return Err(Error::InvalidParameter(format!("frequency {:?} lies outside the spectrum", bad.0)));
    }
    let design = build_real_design(points, freqs)?;
    let fit = fit_real(&design, targets, rcond)?;
    SurrogateModel::from_real_fit(&design, &fit, desc.clone(), SurrogateMode::Rff)
}

/// Samples `n_freqs` distinct frequencies and fits them to precomputed targets.
pub fn fit_rff(
    points: &[Vec<f64>],
    targets: &[f64],
    desc: &SpectrumDescriptor,
    n_freqs: usize,
    seed: u64,
    rcond: f64,
) -> Result<SurrogateModel> {
    let freqs = sample_distinct(desc, n_freqs, seed)?;
    fit_frequencies(points, targets, desc, &freqs, rcond)
}

/// Evaluates the circuit on `points` under `noise` and fits `n_freqs`
/// sampled frequencies to the results.
pub fn surrogate_rff(
    config: &CircuitConfig,
    params: &ParameterSet,
    points: &[Vec<f64>],
    n_freqs: usize,
    seed: u64,
    noise: &NoiseConfig,
    rcond: f64,
) -> Result<SurrogateModel> {
    if points.is_empty() {
        return Err(Error::EmptyInput("training points"));
    }
    let desc = omega_max_of(config);
    let freqs = sample_distinct(&desc, n_freqs, seed)?;
    let targets = evaluate_model(config, params, points, noise)?;
    let mut model = fit_frequencies(points, &targets, &desc, &freqs, rcond)?;
    model.source = Some(fingerprint(config, params));
    Ok(model)
}

/// Same as [`surrogate_rff`] with real-valued frequencies.
pub fn surrogate_rff_continuous(
    config: &CircuitConfig,
    params: &ParameterSet,
    points: &[Vec<f64>],
    n_freqs: usize,
    seed: u64,
    noise: &NoiseConfig,
    rcond: f64,
) -> Result<ContinuousSurrogate> {
    if points.is_empty() {
        return Err(Error::EmptyInput("training points"));
    }
    let freqs = sample_continuous(&omega_max_of(config), n_freqs, seed)?;
    let targets = evaluate_model(config, params, points, noise)?;
    ContinuousSurrogate::fit(points, &targets, freqs, rcond)
}
