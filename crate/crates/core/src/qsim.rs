//! Statevector simulation of the data-reuploading circuit
//! `U(x; Θ) = W^L E(x) … W^1 E(x) W^0`.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so the
//! bitstring label of index `i` reads qubit 0 first. Every trainable block
//! `W^ℓ` applies `Rx`, `Ry`, `Rz` to each qubit and then the CNOTs of the
//! coupling map in list order. The embedding block `E(x)` applies
//! `Rx(x_{feature(q)})` to every qubit `q`. The observable is the mean of the
//! single-qubit `Z` operators.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::seed;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Architecture of a reuploading circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub d_features: usize,
    /// Directed `(control, target)` pairs of the entangling layer.
    pub coupling_map: Vec<(usize, usize)>,
    /// `feature_assignment[q]` is the feature encoded on qubit `q`.
    pub feature_assignment: Vec<usize>,
}

impl CircuitConfig {
    /// Linear-chain coupling and round-robin feature assignment.
    pub fn new(n_qubits: usize, n_layers: usize, d_features: usize) -> Result<Self> {
        let config = Self {
            n_qubits,
            n_layers,
            d_features,
            coupling_map: (0..n_qubits.saturating_sub(1)).map(|q| (q, q + 1)).collect(),
            feature_assignment: (0..n_qubits).map(|q| q % d_features.max(1)).collect(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_coupling_map(mut self, coupling_map: Vec<(usize, usize)>) -> Result<Self> {
        self.coupling_map = coupling_map;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_qubits == 0 {
            return bad("n_qubits must be positive".into());
        }
        if self.n_qubits > 24 {
            return bad(format!("{} qubits is beyond the statevector limit of 24", self.n_qubits));
        }
        if self.n_layers == 0 {
            return bad("n_layers must be positive".into());
        }
        if self.d_features == 0 || self.d_features > self.n_qubits {
            return bad(format!(
                "d_features must lie in [1, n_qubits = {}], got {}",
                self.n_qubits, self.d_features
            ));
        }
        for &(c, t) in &self.coupling_map {
            if c >= self.n_qubits || t >= self.n_qubits {
                return bad(format!("coupling pair ({c}, {t}) out of range"));
            }
            if c == t {
                return bad(format!("coupling pair ({c}, {t}) has control == target"));
            }
        }
        if self.feature_assignment.len() != self.n_qubits {
            return bad(format!(
                "feature_assignment has {} entries for {} qubits",
                self.feature_assignment.len(),
                self.n_qubits
            ));
        }
        let mut seen = vec![false; self.d_features];
        for &f in &self.feature_assignment {
            if f >= self.d_features {
                return bad(format!("feature index {f} out of range"));
            }
            seen[f] = true;
        }
        if let Some(f) = seen.iter().position(|s| !s) {
            return bad(format!("feature {f} is not encoded on any qubit"));
        }
        Ok(())
    }

    /// Number of encoding gates carrying each feature.
    pub fn encoding_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.d_features];
        for &f in &self.feature_assignment {
            counts[f] += 1;
        }
        counts
    }

    pub fn n_params(&self) -> usize {
        (self.n_layers + 1) * self.n_qubits * 3
    }
}

/// Trainable angles, laid out as `[block][qubit][axis]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub angles: Vec<Vec<[f64; 3]>>,
}

impl ParameterSet {
    pub fn zeros(config: &CircuitConfig) -> Self {
        Self { angles: vec![vec![[0.0; 3]; config.n_qubits]; config.n_layers + 1] }
    }

    /// Angles drawn uniformly from `[0, 2π)`.
    pub fn random(config: &CircuitConfig, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let mut params = Self::zeros(config);
        for block in &mut params.angles {
            for qubit in block.iter_mut() {
                for a in qubit.iter_mut() {
                    *a = rng.random_range(0.0..std::f64::consts::TAU);
                }
            }
        }
        params
    }

    pub fn validate(&self, config: &CircuitConfig) -> Result<()> {
        if self.angles.len() != config.n_layers + 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected {} parameter blocks, got {}",
                config.n_layers + 1,
                self.angles.len()
            )));
        }
        for (b, block) in self.angles.iter().enumerate() {
            if block.len() != config.n_qubits {
                return Err(Error::ShapeMismatch(format!(
                    "block {b} has {} qubits, expected {}",
                    block.len(),
                    config.n_qubits
                )));
            }
        }
        if self.angles.iter().flatten().flatten().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("parameters"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.angles.iter().map(|b| b.len() * 3).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.angles.iter().flatten().flatten().copied().collect()
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.len(), "flat parameter length");
        for (dst, src) in self.angles.iter_mut().flatten().flatten().zip(flat) {
            *dst = *src;
        }
    }

    pub fn get_flat(&self, index: usize) -> f64 {
        let n = self.angles[0].len();
        self.angles[index / (3 * n)][(index / 3) % n][index % 3]
    }

    pub fn set_flat_at(&mut self, index: usize, value: f64) {
        let n = self.angles[0].len();
        self.angles[index / (3 * n)][(index / 3) % n][index % 3] = value;
    }
}

/// SHA-256 over the JSON encoding of a circuit and its angles.
pub fn fingerprint(config: &CircuitConfig, params: &ParameterSet) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(config).expect("config serializes"));
    hasher.update(serde_json::to_vec(params).expect("params serialize"));
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub shots: Option<u64>,
    pub depolarizing_p: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self { shots: None, depolarizing_p: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.depolarizing_p) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing_p must lie in [0, 1], got {}",
                self.depolarizing_p
            )));
        }
        if self.shots == Some(0) {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.shots.is_none() && self.depolarizing_p == 0.0
    }

    /// Same noise model with the seed replaced by a child stream.
    pub fn for_stream(&self, stream: u64) -> Self {
        Self { seed: seed::derive(self.seed, stream), ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::ShapeMismatch(format!("amplitude count {len} is not 2^n with n >= 1")));
        }
        let state = Self { n_qubits: len.trailing_zeros() as usize, amplitudes };
        if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state not normalized (|ψ|² = {})",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Applies `exp(−i·angle·P/2)` for the Pauli `P` selected by `axis`.
    pub fn apply_rotation(&mut self, qubit: usize, axis: Axis, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rotate(qubit, axis, angle);
        Ok(())
    }

    fn rotate(&mut self, qubit: usize, axis: Axis, angle: f64) {
        let (s, c) = (angle / 2.0).sin_cos();
        let bit = self.bit(qubit);
        let dim = self.amplitudes.len();
        let amps = &mut self.amplitudes;
        match axis {
            Axis::X => {
                let mis = Complex64::new(0.0, -s);
                for base in (0..dim).step_by(2 * bit) {
                    for i in base..base + bit {
                        let (a0, a1) = (amps[i], amps[i + bit]);
                        amps[i] = a0 * c + a1 * mis;
                        amps[i + bit] = a0 * mis + a1 * c;
                    }
                }
            }
            Axis::Y => {
                for base in (0..dim).step_by(2 * bit) {
                    for i in base..base + bit {
                        let (a0, a1) = (amps[i], amps[i + bit]);
                        amps[i] = a0 * c - a1 * s;
                        amps[i + bit] = a0 * s + a1 * c;
                    }
                }
            }
            Axis::Z => {
                let p0 = Complex64::new(c, -s);
                let p1 = Complex64::new(c, s);
                for base in (0..dim).step_by(2 * bit) {
                    for i in base..base + bit {
                        amps[i] *= p0;
                        amps[i + bit] *= p1;
                    }
                }
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::QubitClash(control));
        }
        self.cnot(control, target);
        Ok(())
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨ψ| (1/n) Σ_q Z_q |ψ⟩`.
    pub fn mean_z(&self) -> f64 {
        let n = self.n_qubits;
        let total: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * z_sum(i, n) as f64)
            .sum();
        total / n as f64
    }

    /// Bitstring label of a basis index, qubit 0 first.
    pub fn label(&self, index: usize) -> String {
        format!("{:0width$b}", index, width = self.n_qubits)
    }
}

/// `Σ_q z_q` for a basis index: (#zeros − #ones).
fn z_sum(index: usize, n_qubits: usize) -> i64 {
    let ones = (index & ((1usize << n_qubits) - 1)).count_ones() as i64;
    n_qubits as i64 - 2 * ones
}

fn check_inputs(config: &CircuitConfig, params: &ParameterSet, x: &[f64]) -> Result<()> {
    config.validate()?;
    params.validate(config)?;
    check_point(config, x)
}

pub(crate) fn check_point(config: &CircuitConfig, x: &[f64]) -> Result<()> {
    if x.len() != config.d_features {
        return Err(Error::DimensionMismatch { expected: config.d_features, got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input point"));
    }
    Ok(())
}

fn apply_block(state: &mut StateVector, config: &CircuitConfig, block: &[[f64; 3]]) {
    for (q, angles) in block.iter().enumerate() {
        for (axis, &angle) in Axis::ALL.iter().zip(angles) {
            state.rotate(q, *axis, angle);
        }
    }
    for &(c, t) in &config.coupling_map {
        state.cnot(c, t);
    }
}

/// Prepares `U(x; Θ)|0…0⟩`.
pub fn run_circuit(config: &CircuitConfig, params: &ParameterSet, x: &[f64]) -> Result<StateVector> {
    check_inputs(config, params, x)?;
    Ok(simulate(config, params, x))
}

/// Shape checks are the caller's job.
pub(crate) fn simulate(config: &CircuitConfig, params: &ParameterSet, x: &[f64]) -> StateVector {
    let mut state = StateVector::zero_state(config.n_qubits);
    apply_block(&mut state, config, &params.angles[0]);
    for block in &params.angles[1..] {
        for (q, &f) in config.feature_assignment.iter().enumerate() {
            state.rotate(q, Axis::X, x[f]);
        }
        apply_block(&mut state, config, block);
    }
    state
}

/// Model output `f_Θ(x)` under the given noise configuration.
pub fn expectation(
    config: &CircuitConfig,
    params: &ParameterSet,
    x: &[f64],
    noise: &NoiseConfig,
) -> Result<f64> {
    check_inputs(config, params, x)?;
    noise.validate()?;
    Ok(expectation_unchecked(config, params, x, noise))
}

pub(crate) fn expectation_unchecked(
    config: &CircuitConfig,
    params: &ParameterSet,
    x: &[f64],
    noise: &NoiseConfig,
) -> f64 {
    let state = simulate(config, params, x);
    let raw = match noise.shots {
        None => state.mean_z(),
        Some(shots) => {
            let counts = sample_counts(&state.probabilities(), shots, noise.seed);
            let n = state.n_qubits;
            let total: f64 = counts
                .iter()
                .enumerate()
                .map(|(i, &c)| c as f64 * z_sum(i, n) as f64)
                .sum();
            total / (n as f64 * shots as f64)
        }
    };
    (1.0 - noise.depolarizing_p) * raw
}

/// Per-basis-index counts of `shots` draws from `probs`.
fn sample_counts(probs: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = seed::rng(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    counts
}

/// Measures every qubit `shots` times; labels put qubit 0 first.
pub fn sample_bitstrings(state: &StateVector, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if (state.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("state not normalized".into()));
    }
    let counts = sample_counts(&state.probabilities(), shots, seed);
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (state.label(i), c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    // --- dense-matrix oracle -------------------------------------------------

    fn single(axis: Axis, angle: f64) -> DMatrix<Complex64> {
        let (s, co) = (angle / 2.0).sin_cos();
        match axis {
            Axis::X => DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]),
            Axis::Y => DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]),
            Axis::Z => DMatrix::from_row_slice(2, 2, &[c(co, -s), c(0.0, 0.0), c(0.0, 0.0), c(co, s)]),
        }
    }

    /// Kronecker embedding with qubit 0 as the leftmost factor.
    fn embed(n: usize, qubit: usize, gate: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
        for q in 0..n {
            let f = if q == qubit { gate.clone() } else { DMatrix::identity(2, 2) };
            m = m.kronecker(&f);
        }
        m
    }

    fn cnot_matrix(n: usize, control: usize, target: usize) -> DMatrix<Complex64> {
        let dim = 1 << n;
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let cb = (i >> (n - 1 - control)) & 1;
            let j = if cb == 1 { i ^ (1 << (n - 1 - target)) } else { i };
            m[(j, i)] = c(1.0, 0.0);
        }
        m
    }

    fn dense_unitary(config: &CircuitConfig, params: &ParameterSet, x: &[f64]) -> DMatrix<Complex64> {
        let n = config.n_qubits;
        let block = |angles: &[[f64; 3]]| {
            let mut u = DMatrix::<Complex64>::identity(1 << n, 1 << n);
            for (q, a) in angles.iter().enumerate() {
                for (axis, &t) in Axis::ALL.iter().zip(a) {
                    u = embed(n, q, &single(*axis, t)) * u;
                }
            }
            for &(ct, tg) in &config.coupling_map {
                u = cnot_matrix(n, ct, tg) * u;
            }
            u
        };
        let mut u = block(&params.angles[0]);
        for l in 1..=config.n_layers {
            for (q, &f) in config.feature_assignment.iter().enumerate() {
                u = embed(n, q, &single(Axis::X, x[f])) * u;
            }
            u = block(&params.angles[l]) * u;
        }
        u
    }

    // --- gates ---------------------------------------------------------------

    #[test]
    fn rx_zero_is_identity() {
        let mut s = StateVector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let before = s.clone();
        s.apply_rotation(0, Axis::X, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn rx_pi_flips_with_phase() {
        let mut s = StateVector::zero_state(1);
        s.apply_rotation(0, Axis::X, PI).unwrap();
        assert!(close(s.amplitudes()[0], c(0.0, 0.0)));
        assert!(close(s.amplitudes()[1], c(0.0, -1.0)));
    }

    #[test]
    fn rz_is_diagonal_phase() {
        let theta = 0.731;
        let mut s = StateVector::zero_state(1);
        s.apply_rotation(0, Axis::Z, theta).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::from_polar(1.0, -theta / 2.0)));
        assert!(close(s.amplitudes()[1], c(0.0, 0.0)));
    }

    #[test]
    fn rotation_rejects_bad_qubit() {
        let mut s = StateVector::zero_state(2);
        assert!(matches!(
            s.apply_rotation(2, Axis::Y, 1.0),
            Err(Error::QubitOutOfRange { index: 2, n_qubits: 2 })
        ));
    }

    #[test]
    fn cnot_cases() {
        // |10⟩ → |11⟩ with qubit 0 as control (index 0b10 = 2).
        let mut s = StateVector::basis(2, 0b10);
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11));

        let mut s = StateVector::zero_state(2);
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, StateVector::zero_state(2));

        let h = FRAC_1_SQRT_2;
        let mut s =
            StateVector::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        s.apply_cnot(0, 1).unwrap();
        let bell = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for (a, b) in s.amplitudes().iter().zip(bell) {
            assert!(close(*a, b));
        }
    }

    #[test]
    fn cnot_rejects_clash_and_range() {
        let mut s = StateVector::zero_state(2);
        assert!(matches!(s.apply_cnot(1, 1), Err(Error::QubitClash(1))));
        assert!(s.apply_cnot(0, 5).is_err());
    }

    // --- circuits ------------------------------------------------------------

    #[test]
    fn single_qubit_identity_blocks() {
        let config = CircuitConfig::new(1, 1, 1).unwrap();
        let params = ParameterSet::zeros(&config);
        let x0 = 1.234;
        let s = run_circuit(&config, &params, &[x0]).unwrap();
        assert!(close(s.amplitudes()[0], c((x0 / 2.0).cos(), 0.0)));
        assert!(close(s.amplitudes()[1], c(0.0, -(x0 / 2.0).sin())));
    }

    #[test]
    fn two_qubit_zero_circuit_stays_in_ground_state() {
        let config = CircuitConfig::new(2, 1, 2).unwrap();
        let s = run_circuit(&config, &ParameterSet::zeros(&config), &[0.0, 0.0]).unwrap();
        assert_eq!(s, StateVector::zero_state(2));
    }

    #[test]
    fn matches_dense_oracle() {
        for (n, layers, d, seed) in [(3, 2, 3, 1u64), (3, 2, 2, 2), (2, 3, 1, 3), (1, 2, 1, 4)] {
            let config = CircuitConfig::new(n, layers, d).unwrap();
            let params = ParameterSet::random(&config, seed);
            let x: Vec<f64> = (0..d).map(|i| 0.3 + 0.7 * i as f64).collect();
            let state = run_circuit(&config, &params, &x).unwrap();
            let u = dense_unitary(&config, &params, &x);
            for (i, a) in state.amplitudes().iter().enumerate() {
                assert!((a - u[(i, 0)]).norm() < 1e-12, "n={n} amplitude {i}");
            }
        }
    }

    #[test]
    fn basis_images_are_orthonormal() {
        let config = CircuitConfig::new(3, 2, 3).unwrap();
        let params = ParameterSet::random(&config, 11);
        let x = [0.1, 0.5, 0.9];
        let outputs: Vec<StateVector> = (0..8)
            .map(|k| {
                // U|k⟩ from the dense oracle's k-th column equals running the
                // circuit on a basis input; the oracle is validated above.
                let u = dense_unitary(&config, &params, &x);
                StateVector { n_qubits: 3, amplitudes: u.column(k).iter().copied().collect() }
            })
            .collect();
        for i in 0..8 {
            for j in 0..8 {
                let ip = outputs[i].inner(&outputs[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn run_circuit_rejects_shape_errors() {
        let config = CircuitConfig::new(2, 1, 2).unwrap();
        let params = ParameterSet::zeros(&config);
        assert!(matches!(
            run_circuit(&config, &params, &[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        let other = ParameterSet::zeros(&CircuitConfig::new(2, 2, 2).unwrap());
        assert!(matches!(run_circuit(&config, &other, &[0.0, 0.0]), Err(Error::ShapeMismatch(_))));
        assert!(run_circuit(&config, &params, &[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CircuitConfig::new(0, 1, 1).is_err());
        assert!(CircuitConfig::new(2, 0, 1).is_err());
        assert!(CircuitConfig::new(2, 1, 3).is_err());
        let base = CircuitConfig::new(3, 1, 2).unwrap();
        assert!(base.clone().with_coupling_map(vec![(0, 3)]).is_err());
        assert!(base.clone().with_coupling_map(vec![(1, 1)]).is_err());
        assert!(base.clone().with_coupling_map(vec![(2, 0), (0, 1)]).is_ok());
        let mut unassigned = base;
        unassigned.feature_assignment = vec![0, 0, 0];
        assert!(unassigned.validate().is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let config = CircuitConfig::new(3, 2, 2).unwrap();
        let params = ParameterSet::random(&config, 5);
        let text = serde_json::to_string(&config).unwrap();
        assert!(text.contains("\"coupling_map\":[[0,1],[1,2]]"));
        assert_eq!(serde_json::from_str::<CircuitConfig>(&text).unwrap(), config);
        let ptext = serde_json::to_string(&params).unwrap();
        assert_eq!(serde_json::from_str::<ParameterSet>(&ptext).unwrap(), params);
    }

    // --- expectation ---------------------------------------------------------

    #[test]
    fn expectation_single_qubit_is_cosine() {
        let config = CircuitConfig::new(1, 1, 1).unwrap();
        let params = ParameterSet::zeros(&config);
        let noise = NoiseConfig::noiseless();
        assert!((expectation(&config, &params, &[0.0], &noise).unwrap() - 1.0).abs() < 1e-15);
        for t in [-3.0, -0.4, 0.0, 0.9, 2.5, 7.1] {
            let e = expectation(&config, &params, &[t], &noise).unwrap();
            assert!((e - t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_with_shots_is_binomial() {
        let config = CircuitConfig::new(1, 1, 1).unwrap();
        let params = ParameterSet::zeros(&config);
        let noise = NoiseConfig { shots: Some(100_000), depolarizing_p: 0.0, seed: 3 };
        let e = expectation(&config, &params, &[PI / 3.0], &noise).unwrap();
        assert!((e - 0.5).abs() <= 0.01, "{e}");
    }

    #[test]
    fn depolarizing_shrinks() {
        let config = CircuitConfig::new(2, 1, 2).unwrap();
        let params = ParameterSet::random(&config, 9);
        let x = [0.3, 0.8];
        let ideal = expectation(&config, &params, &x, &NoiseConfig::noiseless()).unwrap();
        let noisy = NoiseConfig { shots: None, depolarizing_p: 0.25, seed: 0 };
        let e = expectation(&config, &params, &x, &noisy).unwrap();
        assert!((e - 0.75 * ideal).abs() < 1e-15);
        let bad = NoiseConfig { depolarizing_p: 1.5, ..noisy };
        assert!(expectation(&config, &params, &x, &bad).is_err());
    }

    #[test]
    fn shot_error_shrinks_like_inverse_sqrt() {
        let config = CircuitConfig::new(3, 2, 3).unwrap();
        let params = ParameterSet::random(&config, 21);
        let x = [0.2, 0.4, 0.6];
        let exact = expectation(&config, &params, &x, &NoiseConfig::noiseless()).unwrap();
        for shots in [1_000u64, 10_000, 100_000, 1_000_000] {
            // RMS over repeats, scaled by √shots, stays bounded.
            let reps = 20;
            let ms: f64 = (0..reps)
                .map(|r| {
                    let noise = NoiseConfig { shots: Some(shots), depolarizing_p: 0.0, seed: 100 + r };
                    let e = expectation(&config, &params, &x, &noise).unwrap();
                    (e - exact).powi(2)
                })
                .sum::<f64>()
                / reps as f64;
            let scaled = ms.sqrt() * (shots as f64).sqrt();
            assert!(scaled < 2.0, "shots {shots}: scaled rms {scaled}");
        }
    }

    // --- sampling ------------------------------------------------------------

    #[test]
    fn sampling_ground_state() {
        let counts = sample_bitstrings(&StateVector::zero_state(1), 100, 1).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts["0"], 100);
        assert!(matches!(sample_bitstrings(&StateVector::zero_state(1), 0, 1), Err(Error::ZeroShots)));
    }

    #[test]
    fn sampling_plus_state_is_balanced_and_deterministic() {
        let h = FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let shots = 1_000_000u64;
        let counts = sample_bitstrings(&s, shots, 42).unwrap();
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((counts["0"] as f64 - 500_000.0).abs() <= 3.0 * sigma);
        assert_eq!(counts.values().sum::<u64>(), shots);
        assert_eq!(counts, sample_bitstrings(&s, shots, 42).unwrap());
    }

    #[test]
    fn labels_put_qubit_zero_first() {
        let s = StateVector::basis(3, 0b100);
        let counts = sample_bitstrings(&s, 10, 0).unwrap();
        assert_eq!(counts["100"], 10);
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(
            ops in proptest::collection::vec((0usize..3, 0usize..3, -7.0f64..7.0, 0usize..3), 1..40)
        ) {
            let mut s = StateVector::zero_state(3);
            for (q, axis, angle, t) in ops {
                s.apply_rotation(q, Axis::ALL[axis], angle).unwrap();
                if t != q {
                    s.apply_cnot(q, t).unwrap();
                }
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }
}
