use std::f64::consts::TAU;
use std::path::Path;

use num_traits::ToPrimitive;
use qsurrogate::data::{
    dbscan, load_csv, normalize, pca, rescale_targets, synth_generate, train_test_split, write_csv, Dataset,
    SynthKind, SynthSpec, Transform,
};
use qsurrogate::experiments::{run_showcase, run_sweep, ShowcaseConfig, SweepConfig, SweepQuantity};
use qsurrogate::pipeline::{
    alpha_epsilon, beta_d, empirical_kernel_sup, estimate_memory, evaluate_model, failure_probability,
    failure_probability_clipped, lrr_features, min_features, surrogate_exact, surrogate_rff,
    surrogate_rff_continuous, table_discrepancy_report, train, BoundParams, TrainConfig,
};
use qsurrogate::qsim::{expectation, CircuitConfig, NoiseConfig, ParameterSet};
use qsurrogate::spectrum::{canonical_count, omega_max_of, rms_frequency_norm, SpectrumDescriptor};
use qsurrogate::surrogate::{mean_squared_error, relative_mse_deviation, sup_error, SurrogateModel};
use qsurrogate::{seed, Error, Result};
use rand::Rng;
use serde_json::json;

use crate::args::*;
use crate::output::Output;

pub fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    let g = &cli.global;
    let noise = NoiseConfig { shots: g.shots, depolarizing_p: g.depolarizing, seed: g.seed };
    noise.validate()?;
    let mut out = Output::new(&g.out_dir)?;
    let name = match &cli.command {
        Command::Datagen(a) => datagen(a, g, &mut out)?,
        Command::Preprocess(a) => preprocess(a, g, &mut out)?,
        Command::Train(a) => train_cmd(a, g, &mut out)?,
        Command::Surrogate(a) => surrogate(a, g, &noise, &mut out)?,
        Command::Eval(a) => eval(a, &mut out)?,
        Command::Estimate(a) => estimate(a, &mut out)?,
        Command::Bounds(a) => bounds(a, g, &mut out)?,
        Command::Sweep(a) => sweep(a, g, &mut out)?,
        Command::Showcase(a) => showcase(a, g, &mut out)?,
    };
    let config = serde_json::to_value(cli)?;
    out.finish(name, argv, config, json!({ "seed": g.seed, "noise_seed": noise.seed }))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn load_dataset(path: &Path, target: &str) -> Result<Dataset> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        load_csv(path, target)
    } else {
        Dataset::load_json(path)
    }
}

fn parse_coupling(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .trim()
                .split_once('-')
                .ok_or_else(|| Error::InvalidConfig(format!("coupling pair `{pair}` is not `c-t`")))?;
            let parse = |s: &str| {
                s.trim().parse::<usize>().map_err(|_| Error::InvalidConfig(format!("bad qubit index `{s}`")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn circuit_from(args: &CircuitArgs, default_features: Option<usize>) -> Result<CircuitConfig> {
    if let Some(path) = &args.circuit {
        let config: CircuitConfig = read_json(path)?;
        config.validate()?;
        return Ok(config);
    }
    let qubits = args
        .qubits
        .ok_or_else(|| Error::InvalidConfig("either --circuit or --qubits is required".into()))?;
    let features = args.features.or(default_features).unwrap_or(qubits);
    let config = CircuitConfig::new(qubits, args.layers, features)?;
    match &args.coupling {
        Some(text) => config.with_coupling_map(parse_coupling(text)?),
        None => Ok(config),
    }
}

fn params_from(path: Option<&Path>, config: &CircuitConfig, seed: u64) -> Result<ParameterSet> {
    let params = match path {
        Some(p) => read_json(p)?,
        None => ParameterSet::random(config, seed),
    };
    params.validate(config)?;
    Ok(params)
}

fn datagen(a: &DatagenArgs, g: &Global, out: &mut Output) -> Result<&'static str> {
    let kind = match a.kind {
        DataKind::TrigPoly => SynthKind::TrigPoly,
        DataKind::Circuit => SynthKind::Circuit { n_qubits: a.qubits.unwrap_or(a.features), n_layers: a.layers },
    };
    let spec = SynthSpec { d: a.features, size: a.size, kind, seed: g.seed, noise_sd: a.noise_sd };
    let synth = synth_generate(&spec)?;
    out.json("dataset.json", &synth.dataset)?;
    write_csv(&synth.dataset, &out.external("dataset.csv"))?;
    out.json("truth.json", &synth.truth)?;
    Ok("datagen")
}

fn preprocess(a: &PreprocessArgs, g: &Global, out: &mut Output) -> Result<&'static str> {
    let mut ds = load_dataset(&a.input.dataset, &a.input.target)?;
    let mut report = serde_json::Map::new();
    report.insert("rows_in".into(), json!(ds.n_rows()));
    if a.normalize {
        ds = normalize(&ds)?;
    }
    if let Some(k) = a.pca {
        ds = pca(&ds, k)?;
        if let Some(Transform::Pca(p)) = ds.provenance.last() {
            report.insert("explained_variance_ratio".into(), json!(p.explained_variance_ratio));
        }
    }
    if let Some(eps) = a.dbscan_eps {
        let result = dbscan(&ds, eps, a.dbscan_min_pts)?;
        report.insert("dbscan_clusters".into(), json!(result.n_clusters));
        report.insert("dbscan_noise".into(), json!(result.n_noise));
        report.insert("dbscan_labels".into(), json!(result.labels));
        ds = result.dataset;
    }
    if a.rescale_targets {
        ds = rescale_targets(&ds)?;
    }
    report.insert("rows_out".into(), json!(ds.n_rows()));
    out.json("processed.json", &ds)?;
    if let Some(fraction) = a.split {
        let (tr, te) = train_test_split(&ds, fraction, g.seed)?;
        out.json("train.json", &tr)?;
        out.json("test.json", &te)?;
        report.insert("train_rows".into(), json!(tr.n_rows()));
        report.insert("test_rows".into(), json!(te.n_rows()));
    }
    out.json("preprocess_report.json", &report)?;
    Ok("preprocess")
}

fn train_cmd(a: &TrainArgs, g: &Global, out: &mut Output) -> Result<&'static str> {
    let ds = load_dataset(&a.data.dataset, &a.data.target)?;
    let config = circuit_from(&a.circuit, Some(ds.n_features()))?;
    let tc = TrainConfig {
        learning_rate: a.learning_rate,
        max_iters: a.iters,
        seed: g.seed,
        shots: g.shots,
        tolerance: a.tolerance,
        batch_size: a.batch_size,
    };
    let result = train(&config, &ds, &tc)?;
    out.json("circuit.json", &config)?;
    out.json("params.json", &result.params)?;
    out.json(
        "train_report.json",
        &json!({
            "train_config": tc,
            "iterations": result.iterations,
            "converged": result.converged,
            "initial_loss": result.loss_history.first(),
            "final_loss": result.loss_history.last(),
            "loss_history": result.loss_history,
        }),
    )?;
    Ok("train")
}

fn surrogate(a: &SurrogateArgs, g: &Global, noise: &NoiseConfig, out: &mut Output) -> Result<&'static str> {
    let config = circuit_from(&a.circuit, None)?;
    let params = params_from(a.params.as_deref(), &config, g.seed)?;
    out.json("circuit.json", &config)?;
    out.json("params.json", &params)?;
    match a.mode {
        Mode::Exact => {
            let model = surrogate_exact(&config, &params, a.cap, a.rcond)?;
            out.json("model.json", &model)?;
        }
        Mode::Rff => {
            let points = match (&a.dataset, a.points) {
                (Some(path), _) => load_dataset(path, &a.target)?.x,
                (None, Some(n)) => {
                    let mut rng = seed::rng(seed::derive(g.seed, 1));
                    (0..n).map(|_| (0..config.d_features).map(|_| rng.random_range(0.0..TAU)).collect()).collect()
                }
                (None, None) => return Err(Error::InvalidParameter("rff needs --dataset or --points".into())),
            };
            let n_freqs = a
                .frequencies
                .ok_or_else(|| Error::InvalidParameter("rff needs --frequencies".into()))?;
            let freq_seed = seed::derive(g.seed, 2);
            if a.continuous {
                let model = surrogate_rff_continuous(&config, &params, &points, n_freqs, freq_seed, noise, a.rcond)?;
                out.json("continuous_model.json", &model)?;
            } else {
                let model = surrogate_rff(&config, &params, &points, n_freqs, freq_seed, noise, a.rcond)?;
                out.json("model.json", &model)?;
            }
        }
    }
    Ok("surrogate")
}

fn eval(a: &EvalArgs, out: &mut Output) -> Result<&'static str> {
    let model = SurrogateModel::load(&a.model)?;
    let ds = load_dataset(&a.data.dataset, &a.data.target)?;
    if ds.is_empty() {
        return Err(Error::EmptyInput("evaluation set"));
    }
    let preds = model.predict_many(&ds.x)?;
    let surrogate_mse = mean_squared_error(&preds, &ds.y);
    let mut report = json!({
        "rows": ds.n_rows(),
        "n_frequencies": model.n_frequencies(),
        "surrogate_mse": surrogate_mse,
    });
    if let Some(path) = &a.circuit {
        let config: CircuitConfig = read_json(path)?;
        let params = params_from(a.params.as_deref(), &config, 0)?;
        let exact = NoiseConfig::noiseless();
        let quantum = evaluate_model(&config, &params, &ds.x, &exact)?;
        let quantum_mse = mean_squared_error(&quantum, &ds.y);
        let sup = sup_error(&model, |x| expectation(&config, &params, x, &exact), &ds.x)?;
        report["quantum_mse"] = json!(quantum_mse);
        report["relative_mse_deviation"] = json!(relative_mse_deviation(surrogate_mse, quantum_mse));
        report["sup_error_vs_circuit"] = json!(sup);
    }
    out.json("eval.json", &report)?;
    Ok("eval")
}

fn estimate(a: &EstimateArgs, out: &mut Output) -> Result<&'static str> {
    let config = circuit_from(&a.circuit, None)?;
    let est = estimate_memory(&config, a.bytes_per_entry);
    out.json(
        "estimate.json",
        &json!({
            "n_qubits": config.n_qubits,
            "n_layers": config.n_layers,
            "d_features": config.d_features,
            "estimate": est,
            "table_discrepancy": table_discrepancy_report(a.bytes_per_entry),
        }),
    )?;
    Ok("estimate")
}

fn bounds(a: &BoundsArgs, g: &Global, out: &mut Output) -> Result<&'static str> {
    let desc = match &a.omega_max {
        Some(text) => SpectrumDescriptor::new(
            text.split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| Error::InvalidParameter(format!("bad omega_max `{s}`"))))
                .collect::<Result<Vec<u32>>>()?,
        )?,
        None => omega_max_of(&circuit_from(&a.circuit, None)?),
    };
    let d = desc.dim();
    let sigma_p = a.sigma_p.unwrap_or_else(|| rms_frequency_norm(&desc, a.cap, 100_000, g.seed));
    let mut p = BoundParams::new(d, a.epsilon, a.delta, sigma_p);
    if let Some(ell) = a.ell {
        p.ell = ell;
    }
    p.lambda0 = a.lambda0;
    p.m_train = a.m_train;
    p.sigma_y2 = a.sigma_y2;
    p.c1 = a.c1;
    p.c2 = a.c2;
    p.layers = a.circuit.layers;
    p.domain_size = a.domain_size;
    p.validate()?;

    let canonical = canonical_count(&desc);
    let (kernel_sup_term, sup_kernel_error) = match canonical.to_u64() {
        Some(c) if c > 0 && 2 * c < a.cap => {
            let n = a.n_features.unwrap_or(c as usize).min(c as usize);
            let sample = qsurrogate::spectrum::sample_distinct(&desc, n, g.seed)?;
            let k = empirical_kernel_sup(&desc, &sample, a.kernel_trials, g.seed, a.cap)?;
            (k.kernel_sup_term, Some(k.sup_kernel_error))
        }
        _ => (1.0, None),
    };
    let alpha = alpha_epsilon(a.epsilon, kernel_sup_term);
    let d_min = min_features(&p, alpha)?;
    let failure = a.n_features.map(|n| {
        json!({
            "n_features": n,
            "raw": failure_probability(d, a.epsilon, p.sigma_ell(), n, alpha),
            "clipped": failure_probability_clipped(d, a.epsilon, p.sigma_ell(), n, alpha),
        })
    });
    out.json(
        "bounds.json",
        &json!({
            "params": p,
            "omega_max": desc,
            "canonical_frequencies": canonical.to_string(),
            "beta_d": beta_d(d),
            "kernel_sup_term": kernel_sup_term,
            "sup_kernel_error": sup_kernel_error,
            "alpha_epsilon": alpha,
            "min_features": d_min,
            "failure_probability": failure,
            "lrr_features": lrr_features(&p)?,
            "lrr_constants_are_placeholders": true,
        }),
    )?;
    Ok("bounds")
}

fn parse_qubits(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("bad qubit range `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn sweep(a: &SweepArgs, g: &Global, out: &mut Output) -> Result<&'static str> {
    let cfg = SweepConfig {
        quantity: match a.quantity {
            Quantity::Frequencies => SweepQuantity::Frequencies,
            Quantity::Datapoints => SweepQuantity::Datapoints,
        },
        qubits: parse_qubits(&a.qubits)?,
        n_layers: a.layers,
        thresholds: a.thresholds.clone(),
        seeds: a.seeds,
        base_seed: g.seed,
        pool_size: a.pool_size,
        test_size: a.test_size,
        data_noise_sd: a.noise_sd,
        shots: g.shots,
        depolarizing_p: g.depolarizing,
        fixed_frequencies: a.fixed_frequencies,
        max_frequencies: a.max_frequencies,
        rcond: a.rcond,
    };
    let report = run_sweep(&cfg)?;
    out.json("sweep.json", &report)?;
    out.text("sweep.csv", &report.to_csv())?;
    Ok("sweep")
}

fn showcase(a: &ShowcaseArgs, g: &Global, out: &mut Output) -> Result<&'static str> {
    let dataset = a.dataset.as_deref().map(|p| load_dataset(p, &a.target)).transpose()?;
    let features = a.features.or(dataset.as_ref().map(|d| d.n_features())).unwrap_or(a.qubits);
    let config = CircuitConfig::new(a.qubits, a.layers, features)?;
    let params = a.params.as_deref().map(|p| params_from(Some(p), &config, 0)).transpose()?;
    let cfg = ShowcaseConfig {
        n_qubits: a.qubits,
        n_layers: a.layers,
        d_features: features,
        dataset_size: a.size,
        noise_sd: a.noise_sd,
        train_fraction: a.train_fraction,
        n_frequencies: a.frequencies,
        rff_seeds: a.rff_seeds,
        seed: g.seed,
        train: TrainConfig {
            learning_rate: a.learning_rate,
            max_iters: a.iters,
            seed: g.seed,
            shots: g.shots,
            tolerance: 0.0,
            batch_size: Some(a.batch_size),
        },
        rcond: qsurrogate::linalg::DEFAULT_RCOND,
    };
    let report = run_showcase(&cfg, dataset.as_ref(), params)?;
    out.json("showcase.json", &report)?;
    Ok("showcase")
}
