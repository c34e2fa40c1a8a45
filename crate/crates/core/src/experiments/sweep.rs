use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{linear_fit, median, LinearFit};
use crate::data::{synth_generate, GroundTruth, SynthKind, SynthSpec};
use crate::error::{Error, Result};
use crate::pipeline::{evaluate_model, fit_frequencies};
use crate::qsim::NoiseConfig;
use crate::seed;
use crate::spectrum::{canonical_count, omega_max_of, sample_distinct, FrequencyVector, SpectrumDescriptor};
use crate::surrogate::{mean_squared_error, relative_mse_deviation};

/// Frequency budget used when none is given.
pub const DEFAULT_FREQUENCY_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepQuantity {
    /// Number of sampled frequencies, all pool points used.
    Frequencies,
    /// Number of training points, frequency count fixed.
    Datapoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub quantity: SweepQuantity,
    pub qubits: Vec<usize>,
    pub n_layers: usize,
    /// Relative test-MSE deviations, e.g. `0.1` for 10 %.
    pub thresholds: Vec<f64>,
    pub seeds: usize,
    pub base_seed: u64,
    /// Training points available per seed.
    pub pool_size: usize,
    pub test_size: usize,
    /// Label noise of the synthetic data, sets the quantum model's test MSE.
    pub data_noise_sd: f64,
    /// Measurement noise applied when sampling the quantum model.
    pub shots: Option<u64>,
    pub depolarizing_p: f64,
    /// Frequencies in datapoints mode; defaults to `min(10⁴, canonical count)`.
    pub fixed_frequencies: Option<usize>,
    /// Upper end of the search in frequencies mode; defaults to the same cap.
    pub max_frequencies: Option<usize>,
    pub rcond: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.qubits.is_empty() || self.qubits.contains(&0) {
            return bad("qubit range must be non-empty and positive");
        }
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !(*t >= 0.0)) {
            return bad("thresholds must be non-negative");
        }
        if self.seeds == 0 || self.pool_size == 0 || self.test_size == 0 || self.n_layers == 0 {
            return bad("seeds, layers, pool and test sizes must be positive");
        }
        if !(self.data_noise_sd > 0.0) {
            return bad("data_noise_sd must be positive so the quantum model has a non-zero test MSE");
        }
        NoiseConfig { shots: self.shots, depolarizing_p: self.depolarizing_p, seed: 0 }.validate()
    }

    fn frequency_cap(&self, desc: &SpectrumDescriptor, explicit: Option<usize>) -> usize {
        let canonical = canonical_count(desc).to_usize().unwrap_or(usize::MAX);
        explicit.unwrap_or(DEFAULT_FREQUENCY_BUDGET).min(canonical)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n_qubits: usize,
    pub threshold: f64,
    /// Smallest quantity whose median deviation over the seeds meets the
    /// threshold; `None` when saturated.
    pub required_quantity: Option<usize>,
    pub seeds_used: usize,
    /// Per-seed minima; `None` marks a seed that never met the threshold.
    pub per_seed: Vec<Option<usize>>,
    /// Mean and sample standard deviation of the non-saturated per-seed minima.
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub saturated_seeds: usize,
    pub canonical_frequencies: usize,
    pub quantum_test_mse_median: f64,
}

impl SweepRecord {
    pub fn saturated(&self) -> bool {
        self.required_quantity.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub threshold: f64,
    /// Line through `(n_qubits, required_quantity)`; absent with fewer than
    /// two non-saturated points.
    pub fit: Option<LinearFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub axis: String,
    pub config: SweepConfig,
    pub records: Vec<SweepRecord>,
    pub fits: Vec<ThresholdFit>,
}

impl SweepReport {
    pub fn record(&self, n_qubits: usize, threshold: f64) -> Option<&SweepRecord> {
        self.records.iter().find(|r| r.n_qubits == n_qubits && r.threshold == threshold)
    }

    /// `n_qubits,threshold,quantity_mean,quantity_std`; saturated cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_qubits,threshold,quantity_mean,quantity_std\n");
        let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{}", r.n_qubits, r.threshold, cell(r.mean), cell(r.std));
        }
        out
    }
}

/// Data and sampled frequencies for one `(n, seed)` pair.
struct Problem {
    desc: SpectrumDescriptor,
    train_x: Vec<Vec<f64>>,
    train_targets: Vec<f64>,
    test_x: Vec<Vec<f64>>,
    test_y: Vec<f64>,
    quantum_test_mse: f64,
    freqs: Vec<FrequencyVector>,
}

impl Problem {
    fn build(cfg: &SweepConfig, n: usize, seed_index: usize) -> Result<Self> {
        let s = seed::derive(seed::derive(cfg.base_seed, n as u64), seed_index as u64);
        let spec = SynthSpec {
            d: n,
            size: cfg.pool_size + cfg.test_size,
            kind: SynthKind::Circuit { n_qubits: n, n_layers: cfg.n_layers },
            seed: s,
            noise_sd: cfg.data_noise_sd,
        };
        let synth = synth_generate(&spec)?;
        let GroundTruth::Circuit { config, params } = &synth.truth else {
            unreachable!("circuit kind yields a circuit truth")
        };
        let desc = omega_max_of(config);
        let (train, test) = synth.dataset.x.split_at(cfg.pool_size);
        let test_y = synth.dataset.y[cfg.pool_size..].to_vec();
        let quantum_pred = evaluate_model(config, params, test, &NoiseConfig::noiseless())?;
        let noise = NoiseConfig { shots: cfg.shots, depolarizing_p: cfg.depolarizing_p, seed: seed::derive(s, 7) };
        let train_targets = evaluate_model(config, params, train, &noise)?;
        let n_freqs = match cfg.quantity {
            SweepQuantity::Frequencies => cfg.frequency_cap(&desc, cfg.max_frequencies),
            SweepQuantity::Datapoints => cfg.frequency_cap(&desc, cfg.fixed_frequencies),
        };
        let freqs = sample_distinct(&desc, n_freqs, seed::derive(s, 11))?;
        Ok(Self {
            desc,
            train_x: train.to_vec(),
            train_targets,
            test_x: test.to_vec(),
            quantum_test_mse: mean_squared_error(&quantum_pred, &test_y),
            test_y,
            freqs,
        })
    }

    fn deviation(&self, quantity: SweepQuantity, q: usize, rcond: f64) -> Result<f64> {
        let (rows, cols) = match quantity {
            SweepQuantity::Frequencies => (self.train_x.len(), q),
            SweepQuantity::Datapoints => (q, self.freqs.len()),
        };
        let model = fit_frequencies(
            &self.train_x[..rows],
            &self.train_targets[..rows],
            &self.desc,
            &self.freqs[..cols],
            rcond,
        )?;
        let pred: Vec<f64> = self.test_x.iter().map(|x| model.predict_unchecked(x)).collect();
        let dev = relative_mse_deviation(mean_squared_error(&pred, &self.test_y), self.quantum_test_mse);
        Ok(if dev.is_nan() { f64::INFINITY } else { dev })
    }
}

/// Smallest `q ∈ [lo, hi]` with `pass(q)`, found by doubling from `lo` and
/// then bisecting. `None` if `pass(hi)` fails.
pub fn bracket_search<F>(lo: usize, hi: usize, mut pass: F) -> Result<Option<usize>>
where
    F: FnMut(usize) -> Result<bool>,
{
    if lo > hi {
        return Ok(None);
    }
    let mut fail = None;
    let mut q = lo;
    loop {
        if pass(q)? {
            break;
        }
        if q == hi {
            return Ok(None);
        }
        fail = Some(q);
        q = (q * 2).min(hi);
    }
    let (mut bad, mut good) = match fail {
        None => return Ok(Some(q)),
        Some(f) => (f, q),
    };
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if pass(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(good))
}

struct Evaluator<'a> {
    cfg: &'a SweepConfig,
    problems: Vec<Problem>,
    cache: Mutex<HashMap<(usize, usize), f64>>,
}

impl Evaluator<'_> {
    fn deviation(&self, seed_index: usize, q: usize) -> Result<f64> {
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&(seed_index, q)) {
            return Ok(v);
        }
        let v = self.problems[seed_index].deviation(self.cfg.quantity, q, self.cfg.rcond)?;
        self.cache.lock().expect("cache lock").insert((seed_index, q), v);
        Ok(v)
    }

    fn median_deviation(&self, q: usize) -> Result<f64> {
        let devs = (0..self.problems.len())
            .into_par_iter()
            .map(|s| self.deviation(s, q))
            .collect::<Result<Vec<f64>>>()?;
        Ok(median(&devs))
    }

    fn upper(&self) -> usize {
        let p = &self.problems[0];
        match self.cfg.quantity {
            SweepQuantity::Frequencies => p.freqs.len(),
            SweepQuantity::Datapoints => p.train_x.len(),
        }
    }
}

/// For every qubit count and threshold, finds the smallest frequency or
/// datapoint count meeting the relative test-MSE deviation.
///
/// Thresholds are processed strictest first; each looser search is capped at
/// the stricter answer, which is known to pass.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut qubits = cfg.qubits.clone();
    qubits.sort_unstable();
    qubits.dedup();
    let mut thresholds = cfg.thresholds.clone();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut records = Vec::new();
    for &n in &qubits {
        let problems = (0..cfg.seeds)
            .into_par_iter()
            .map(|s| Problem::build(cfg, n, s))
            .collect::<Result<Vec<Problem>>>()?;
        let canonical = canonical_count(&problems[0].desc).to_usize().unwrap_or(usize::MAX);
        let quantum_mse = median(&problems.iter().map(|p| p.quantum_test_mse).collect::<Vec<_>>());
        let eval = Evaluator { cfg, problems, cache: Mutex::new(HashMap::new()) };
        let top = eval.upper();

        let mut ensemble_cap = top;
        let mut seed_caps = vec![top; cfg.seeds];
        for &threshold in &thresholds {
            let required = bracket_search(1, ensemble_cap, |q| Ok(eval.median_deviation(q)? <= threshold))?;
            let per_seed = (0..cfg.seeds)
                .into_par_iter()
                .map(|s| bracket_search(1, seed_caps[s], |q| Ok(eval.deviation(s, q)? <= threshold)))
                .collect::<Result<Vec<Option<usize>>>>()?;
            if let Some(r) = required {
                ensemble_cap = r;
            }
            for (cap, found) in seed_caps.iter_mut().zip(&per_seed) {
                if let Some(f) = found {
                    *cap = *f;
                }
            }
            let found: Vec<f64> = per_seed.iter().flatten().map(|&v| v as f64).collect();
            let mean = (!found.is_empty()).then(|| found.iter().sum::<f64>() / found.len() as f64);
            let std = mean.map(|m| {
                if found.len() < 2 {
                    0.0
                } else {
                    (found.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (found.len() - 1) as f64).sqrt()
                }
            });
            tracing::info!(n, threshold, ?required, "sweep point");
            records.push(SweepRecord {
                n_qubits: n,
                threshold,
                required_quantity: required,
                seeds_used: cfg.seeds,
                saturated_seeds: per_seed.iter().filter(|v| v.is_none()).count(),
                per_seed,
                mean,
                std,
                canonical_frequencies: canonical,
                quantum_test_mse_median: quantum_mse,
            });
        }
    }
    records.sort_by(|a, b| a.n_qubits.cmp(&b.n_qubits).then(a.threshold.total_cmp(&b.threshold)));

    let fits = thresholds
        .iter()
        .map(|&threshold| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = records
                .iter()
                .filter(|r| r.threshold == threshold)
                .filter_map(|r| r.required_quantity.map(|q| (r.n_qubits as f64, q as f64)))
                .unzip();
            ThresholdFit { threshold, fit: linear_fit(&xs, &ys).ok() }
        })
        .collect();

    let axis = match cfg.quantity {
        SweepQuantity::Frequencies => "frequencies",
        SweepQuantity::Datapoints => "datapoints",
    };
    Ok(SweepReport { axis: axis.into(), config: cfg.clone(), records, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_search_finds_threshold() {
        for target in 1..=40 {
            let mut calls = 0;
            let got = bracket_search(1, 40, |q| {
                calls += 1;
                Ok(q >= target)
            })
            .unwrap();
            assert_eq!(got, Some(target));
            assert!(calls <= 14);
        }
        assert_eq!(bracket_search(1, 10, |_| Ok(false)).unwrap(), None);
        assert_eq!(bracket_search(3, 3, |_| Ok(true)).unwrap(), Some(3));
    }

    fn config(quantity: SweepQuantity, qubits: Vec<usize>) -> SweepConfig {
        SweepConfig {
            quantity,
            qubits,
            n_layers: 1,
            thresholds: vec![0.003, 0.03, 0.1],
            seeds: 3,
            base_seed: 5,
            pool_size: 60,
            test_size: 40,
            data_noise_sd: 0.1,
            shots: None,
            depolarizing_p: 0.0,
            fixed_frequencies: None,
            max_frequencies: None,
            rcond: 1e-10,
        }
    }

    #[test]
    fn one_qubit_needs_one_frequency() {
        let report = run_sweep(&config(SweepQuantity::Frequencies, vec![1])).unwrap();
        let r = report.record(1, 0.1).unwrap();
        assert_eq!(r.required_quantity, Some(1));
        assert_eq!(r.per_seed, vec![Some(1); 3]);
    }

    #[test]
    fn looser_thresholds_need_less() {
        let report = run_sweep(&config(SweepQuantity::Datapoints, vec![2, 3])).unwrap();
        for n in [2, 3] {
            let q: Vec<usize> = [0.003, 0.03, 0.1]
                .iter()
                .map(|&t| report.record(n, t).unwrap().required_quantity.unwrap_or(usize::MAX))
                .collect();
            assert!(q[0] >= q[1] && q[1] >= q[2], "{q:?}");
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("n_qubits,threshold,quantity_mean,quantity_std\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn rejects_zero_noise() {
        let cfg = SweepConfig { data_noise_sd: 0.0, ..config(SweepQuantity::Frequencies, vec![1]) };
        assert!(run_sweep(&cfg).is_err());
    }
}
