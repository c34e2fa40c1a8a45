use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::median;
use crate::data::{synth_generate, train_test_split, Dataset, SynthKind, SynthSpec};
use crate::error::{Error, Result};
use crate::pipeline::{evaluate_model, fit_rff, train_from, TrainConfig, TrainResult};
use crate::qsim::{CircuitConfig, NoiseConfig, ParameterSet};
use crate::seed;
use crate::spectrum::{lattice_size, omega_max_of};
use crate::surrogate::{mean_squared_error, relative_mse_deviation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShowcaseConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub d_features: usize,
    pub dataset_size: usize,
    pub noise_sd: f64,
    pub train_fraction: f64,
    pub n_frequencies: usize,
    pub rff_seeds: usize,
    pub seed: u64,
    pub train: TrainConfig,
    pub rcond: f64,
}

impl Default for ShowcaseConfig {
    fn default() -> Self {
        Self {
            n_qubits: 8,
            n_layers: 2,
            d_features: 8,
            dataset_size: 500,
            noise_sd: 0.05,
            train_fraction: 0.7,
            n_frequencies: 150,
            rff_seeds: 10,
            seed: 0,
            train: TrainConfig { learning_rate: 1.0, max_iters: 150, seed: 0, shots: None, tolerance: 0.0, batch_size: Some(32) },
            rcond: crate::linalg::DEFAULT_RCOND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateOutcome {
    pub seed: u64,
    pub surrogate_test_mse: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShowcaseReport {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub lattice_size: String,
    pub n_frequencies: usize,
    /// `D / lattice_size`.
    pub frequency_fraction: f64,
    pub quantum_train_mse: f64,
    pub quantum_test_mse: f64,
    /// Median over the surrogate seeds.
    pub surrogate_test_mse: f64,
    pub median_relative_deviation: f64,
    pub outcomes: Vec<SurrogateOutcome>,
    pub loss_history: Vec<f64>,
}

/// `D / ∏(2ω_max(i) + 1)` for the circuit's spectrum.
pub fn frequency_fraction(config: &CircuitConfig, n_frequencies: usize) -> f64 {
    n_frequencies as f64 / lattice_size(&omega_max_of(config)).to_f64().unwrap_or(f64::INFINITY)
}

/// Fits `rff_seeds` surrogates to a trained model's outputs on the training
/// inputs and scores model and surrogates on the test set.
pub fn evaluate_showcase(
    config: &CircuitConfig,
    params: &ParameterSet,
    train: &Dataset,
    test: &Dataset,
    n_frequencies: usize,
    seeds: &[u64],
    rcond: f64,
) -> Result<ShowcaseReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one surrogate seed is needed".into()));
    }
    let exact = NoiseConfig::noiseless();
    let train_pred = evaluate_model(config, params, &train.x, &exact)?;
    let test_pred = evaluate_model(config, params, &test.x, &exact)?;
    let quantum_train_mse = mean_squared_error(&train_pred, &train.y);
    let quantum_test_mse = mean_squared_error(&test_pred, &test.y);
    let desc = omega_max_of(config);

    let outcomes = seeds
        .par_iter()
        .map(|&s| {
            let model = fit_rff(&train.x, &train_pred, &desc, n_frequencies, s, rcond)?;
            let pred: Vec<f64> = test.x.iter().map(|x| model.predict_unchecked(x)).collect();
            let mse = mean_squared_error(&pred, &test.y);
            Ok(SurrogateOutcome {
                seed: s,
                surrogate_test_mse: mse,
                relative_deviation: relative_mse_deviation(mse, quantum_test_mse),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ShowcaseReport {
        n_qubits: config.n_qubits,
        n_layers: config.n_layers,
        n_train: train.n_rows(),
        n_test: test.n_rows(),
        lattice_size: lattice_size(&desc).to_string(),
        n_frequencies,
        frequency_fraction: frequency_fraction(config, n_frequencies),
        quantum_train_mse,
        quantum_test_mse,
        surrogate_test_mse: median(&outcomes.iter().map(|o| o.surrogate_test_mse).collect::<Vec<_>>()),
        median_relative_deviation: median(&outcomes.iter().map(|o| o.relative_deviation).collect::<Vec<_>>()),
        outcomes,
        loss_history: Vec::new(),
    })
}

/// Generates a trigonometric-polynomial dataset (unless one is given),
/// trains the circuit (unless angles are given) and runs
/// [`evaluate_showcase`].
pub fn run_showcase(
    cfg: &ShowcaseConfig,
    dataset: Option<&Dataset>,
    params: Option<ParameterSet>,
) -> Result<ShowcaseReport> {
    let config = CircuitConfig::new(cfg.n_qubits, cfg.n_layers, cfg.d_features)?;
    let generated;
    let dataset = match dataset {
        Some(ds) => ds,
        None => {
            let spec = SynthSpec {
                d: cfg.d_features,
                size: cfg.dataset_size,
                kind: SynthKind::TrigPoly,
                seed: cfg.seed,
                noise_sd: cfg.noise_sd,
            };
            generated = synth_generate(&spec)?.dataset;
            &generated
        }
    };
    let (train, test) = train_test_split(dataset, cfg.train_fraction, seed::derive(cfg.seed, 1))?;
    let (params, history) = match params {
        Some(p) => (p, Vec::new()),
        None => {
            let init = ParameterSet::random(&config, cfg.train.seed);
            let TrainResult { params, loss_history, .. } = train_from(&config, init, &train.x, &train.y, &cfg.train)?;
            (params, loss_history)
        }
    };
    let seeds: Vec<u64> = (0..cfg.rff_seeds as u64).map(|s| seed::derive(cfg.seed, 100 + s)).collect();
    let mut report = evaluate_showcase(&config, &params, &train, &test, cfg.n_frequencies, &seeds, cfg.rcond)?;
    report.loss_history = history;
    Ok(report)
}
