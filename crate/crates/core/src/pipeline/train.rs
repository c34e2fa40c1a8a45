//! Fixed-step gradient descent on the mean squared error, with gradients from
//! the parameter-shift rule.

use std::f64::consts::FRAC_PI_2;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::qsim::{self, expectation_unchecked, CircuitConfig, NoiseConfig, ParameterSet};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Shots per circuit evaluation inside gradients; `None` means exact.
    pub shots: Option<u64>,
    /// Stop once the full-data loss changes by less than this between steps.
    pub tolerance: f64,
    /// Points per gradient step; `None` uses the whole dataset.
    pub batch_size: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.1, max_iters: 100, seed: 0, shots: None, tolerance: 0.0, batch_size: None }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter("tolerance must be non-negative".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::ZeroShots);
        }
        if self.batch_size == Some(0) {
            return Err(Error::InvalidParameter("batch_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub params: ParameterSet,
    /// Exact full-data loss before the first step and after every step.
    pub loss_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `∂f/∂θ_k` for every flat parameter index, as `[f(θ_k + π/2) − f(θ_k − π/2)] / 2`.
pub fn parameter_shift_gradient(
    config: &CircuitConfig,
    params: &ParameterSet,
    x: &[f64],
    noise: &NoiseConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    params.validate(config)?;
    qsim::check_point(config, x)?;
    noise.validate()?;
    Ok(shift_gradient(config, params, x, noise))
}

fn shift_gradient(config: &CircuitConfig, params: &ParameterSet, x: &[f64], noise: &NoiseConfig) -> Vec<f64> {
    let mut shifted = params.clone();
    (0..params.len())
        .map(|k| {
            let theta = params.get_flat(k);
            shifted.set_flat_at(k, theta + FRAC_PI_2);
            let plus = expectation_unchecked(config, &shifted, x, &noise.for_stream(2 * k as u64));
            shifted.set_flat_at(k, theta - FRAC_PI_2);
            let minus = expectation_unchecked(config, &shifted, x, &noise.for_stream(2 * k as u64 + 1));
            shifted.set_flat_at(k, theta);
            (plus - minus) / 2.0
        })
        .collect()
}

fn full_loss(config: &CircuitConfig, params: &ParameterSet, x: &[Vec<f64>], y: &[f64]) -> f64 {
    let exact = NoiseConfig::noiseless();
    let total: f64 = x
        .par_iter()
        .zip(y)
        .map(|(xi, yi)| (expectation_unchecked(config, params, xi, &exact) - yi).powi(2))
        .sum();
    total / x.len() as f64
}

/// Trains from angles drawn uniformly with `tc.seed`.
pub fn train(config: &CircuitConfig, dataset: &Dataset, tc: &TrainConfig) -> Result<TrainResult> {
    let init = ParameterSet::random(config, tc.seed);
    train_from(config, init, &dataset.x, &dataset.y, tc)
}

/// Gradient descent from the given angles on `(x, y)`.
///
/// With `max_iters = 0` the initial angles are returned unchanged.
pub fn train_from(
    config: &CircuitConfig,
    init: ParameterSet,
    x: &[Vec<f64>],
    y: &[f64],
    tc: &TrainConfig,
) -> Result<TrainResult> {
    config.validate()?;
    init.validate(config)?;
    tc.validate()?;
    if x.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    for xi in x {
        qsim::check_point(config, xi)?;
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training targets"));
    }

    let mut params = init;
    let mut loss = full_loss(config, &params, x, y);
    if !loss.is_finite() {
        return Err(Error::Divergence { iteration: 0, loss });
    }
    let mut history = vec![loss];
    let mut batch_rng = seed::rng(seed::derive(tc.seed, u64::MAX));
    let batch = tc.batch_size.map(|b| b.min(x.len())).unwrap_or(x.len());
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..tc.max_iters {
        let indices: Vec<usize> = if batch < x.len() {
            sample(&mut batch_rng, x.len(), batch).into_vec()
        } else {
            (0..x.len()).collect()
        };
        let n_params = params.len();
        let grad = indices
            .par_iter()
            .map(|&j| {
                let noise = NoiseConfig {
                    shots: tc.shots,
                    depolarizing_p: 0.0,
                    seed: seed::derive(seed::derive(tc.seed, it as u64), j as u64),
                };
                let f = expectation_unchecked(config, &params, &x[j], &noise.for_stream(u64::MAX));
                let g = shift_gradient(config, &params, &x[j], &noise);
                g.into_iter().map(|gk| 2.0 * (f - y[j]) * gk).collect::<Vec<f64>>()
            })
            .reduce(
                || vec![0.0; n_params],
                |mut acc, g| {
                    acc.iter_mut().zip(g).for_each(|(a, b)| *a += b);
                    acc
                },
            );
        let scale = tc.learning_rate / indices.len() as f64;
        let mut flat = params.to_flat();
        flat.iter_mut().zip(&grad).for_each(|(t, g)| *t -= scale * g);
        params.set_flat(&flat);

        let next = full_loss(config, &params, x, y);
        iterations = it + 1;
        if !next.is_finite() {
            return Err(Error::Divergence { iteration: iterations, loss: next });
        }
        history.push(next);
        let delta = (loss - next).abs();
        loss = next;
        if tc.tolerance > 0.0 && delta < tc.tolerance {
            converged = true;
            break;
        }
    }
    Ok(TrainResult { params, loss_history: history, iterations, converged })
}
