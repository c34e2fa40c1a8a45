use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "qsurrogate", version, about = "Classical Fourier surrogates for reuploading quantum circuits")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Base seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving artifacts and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Measurement shots per circuit evaluation (exact expectation if absent).
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Global depolarizing strength in [0, 1].
    #[arg(long, global = true, default_value_t = 0.0)]
    pub depolarizing: f64,
    /// Emit logs as JSON lines on stderr.
    #[arg(long, global = true)]
    pub json_logs: bool,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Generate a synthetic dataset.
    Datagen(DatagenArgs),
    /// Normalize, reduce, filter and split a dataset.
    Preprocess(PreprocessArgs),
    /// Fit circuit angles to a dataset with parameter-shift gradient descent.
    Train(TrainArgs),
    /// Build a classical surrogate of a circuit.
    Surrogate(SurrogateArgs),
    /// Score a surrogate on a dataset.
    Eval(EvalArgs),
    /// Memory needed by the exact method.
    Estimate(EstimateArgs),
    /// Feature-count bounds for random Fourier features.
    Bounds(BoundsArgs),
    /// Required frequencies or datapoints across qubit counts.
    Sweep(SweepArgs),
    /// Train a model and compare it with cheap surrogates.
    Showcase(ShowcaseArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    TrigPoly,
    Circuit,
}

#[derive(Debug, Args, Serialize)]
pub struct DatagenArgs {
    #[arg(long, value_enum, default_value = "trig-poly")]
    pub kind: DataKind,
    #[arg(long, default_value_t = 2)]
    pub features: usize,
    #[arg(long, default_value_t = 100)]
    pub size: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    /// Qubits of the teacher circuit (circuit kind); defaults to `--features`.
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DatasetArgs {
    /// Dataset JSON, or CSV with a header row.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Target column for CSV input.
    #[arg(long, default_value = "y")]
    pub target: String,
}

#[derive(Debug, Args, Serialize)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub input: DatasetArgs,
    #[arg(long)]
    pub normalize: bool,
    /// Keep this many principal components.
    #[arg(long)]
    pub pca: Option<usize>,
    /// Drop DBSCAN noise with this radius.
    #[arg(long)]
    pub dbscan_eps: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub dbscan_min_pts: usize,
    /// Map targets onto [-1, 1].
    #[arg(long)]
    pub rescale_targets: bool,
    /// Also write a seeded train/test split with this training fraction.
    #[arg(long)]
    pub split: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CircuitArgs {
    /// Circuit configuration JSON; overrides the shape flags.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    /// Input features; defaults to the qubit count.
    #[arg(long)]
    pub features: Option<usize>,
    /// CNOT pairs such as `0-1,1-2`; defaults to a chain.
    #[arg(long)]
    pub coupling: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Rff,
}

#[derive(Debug, Args, Serialize)]
pub struct SurrogateArgs {
    #[arg(value_enum)]
    pub mode: Mode,
    #[command(flatten)]
    pub circuit: CircuitArgs,
    /// Angles JSON; random angles from `--seed` otherwise.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Largest lattice the exact method may enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub rcond: f64,
    /// Training inputs for rff (dataset JSON or CSV).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, default_value = "y")]
    pub target: String,
    /// Draw this many uniform inputs in [0, 2pi)^d instead of a dataset.
    #[arg(long)]
    pub points: Option<usize>,
    /// Number of sampled frequencies for rff.
    #[arg(long)]
    pub frequencies: Option<usize>,
    /// Sample real-valued instead of integer frequencies.
    #[arg(long)]
    pub continuous: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Also compare against this circuit.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[arg(long, requires = "circuit")]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 16)]
    pub bytes_per_entry: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    /// Per-feature maximal frequencies such as `2,2`; taken from the circuit otherwise.
    #[arg(long)]
    pub omega_max: Option<String>,
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// RMS frequency norm; computed from the spectrum otherwise.
    #[arg(long)]
    pub sigma_p: Option<f64>,
    /// Domain diameter; 2pi*sqrt(d) otherwise.
    #[arg(long)]
    pub ell: Option<f64>,
    /// Feature count at which to report the failure probability.
    #[arg(long)]
    pub n_features: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub kernel_trials: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
    #[arg(long, default_value_t = 0.01)]
    pub lambda0: f64,
    #[arg(long, default_value_t = 100)]
    pub m_train: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_y2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub domain_size: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Frequencies,
    Datapoints,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Qubit counts, as `4..7` or `4,5,6`.
    #[arg(long, default_value = "2..4")]
    pub qubits: String,
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    /// Relative test-MSE deviations.
    #[arg(long, value_delimiter = ',', default_value = "0.003,0.03,0.1")]
    pub thresholds: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[arg(long, default_value_t = 400)]
    pub pool_size: usize,
    #[arg(long, default_value_t = 200)]
    pub test_size: usize,
    #[arg(long, default_value_t = 0.1)]
    pub noise_sd: f64,
    /// Frequencies in datapoints mode; min(10000, canonical count) otherwise.
    #[arg(long)]
    pub fixed_frequencies: Option<usize>,
    /// Search limit in frequencies mode.
    #[arg(long)]
    pub max_frequencies: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub rcond: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ShowcaseArgs {
    #[arg(long, default_value_t = 8)]
    pub qubits: usize,
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    #[arg(long)]
    pub features: Option<usize>,
    /// Use this dataset instead of a synthetic one.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, default_value = "y")]
    pub target: String,
    /// Use these trained angles instead of training.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub size: usize,
    #[arg(long, default_value_t = 0.05)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 150)]
    pub frequencies: usize,
    #[arg(long, default_value_t = 10)]
    pub rff_seeds: usize,
    #[arg(long, default_value_t = 1.0)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 150)]
    pub iters: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
}
