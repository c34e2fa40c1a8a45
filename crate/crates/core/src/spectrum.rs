//! The integer frequency lattice of a Pauli angle embedding and the
//! equidistant grid that recovers its Fourier coefficients exactly.

use std::collections::HashSet;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::CircuitConfig;
use crate::seed;

/// Largest frequency magnitude per feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectrumDescriptor {
    pub omega_max: Vec<u32>,
}

impl SpectrumDescriptor {
    pub fn new(omega_max: Vec<u32>) -> Result<Self> {
        if omega_max.is_empty() {
            return Err(Error::EmptyInput("spectrum descriptor"));
        }
        Ok(Self { omega_max })
    }

    pub fn dim(&self) -> usize {
        self.omega_max.len()
    }

    /// Points per feature on the exact-recovery grid, `2ω_max(i) + 1`.
    pub fn per_feature_counts(&self) -> Vec<usize> {
        self.omega_max.iter().map(|&w| 2 * w as usize + 1).collect()
    }

    pub fn contains(&self, freq: &FrequencyVector) -> bool {
        freq.dim() == self.dim()
            && freq.0.iter().zip(&self.omega_max).all(|(c, &w)| c.unsigned_abs() <= w as u64)
    }
}

/// Integer frequency vector `ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(pub Vec<i64>);

impl FrequencyVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// First nonzero component positive, or all zero.
    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_none_or(|&c| c > 0)
    }

    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            self.clone()
        } else {
            self.negated()
        }
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// `ω · x`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&w, &v)| w as f64 * v).sum()
    }

    pub fn norm_sqr(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }
}

/// Tensor-product grid on `[0, 2π)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: Vec<Vec<f64>>,
    pub per_feature_counts: Vec<usize>,
}

/// `ω_max(i) = L · (number of qubits encoding feature i)`.
pub fn omega_max_of(config: &CircuitConfig) -> SpectrumDescriptor {
    SpectrumDescriptor {
        omega_max: config
            .encoding_counts()
            .into_iter()
            .map(|g| (config.n_layers * g) as u32)
            .collect(),
    }
}

/// `∏ (2ω_max(i) + 1)`.
pub fn lattice_size(desc: &SpectrumDescriptor) -> BigUint {
    desc.per_feature_counts()
        .into_iter()
        .fold(BigUint::one(), |acc, t| acc * BigUint::from(t))
}

/// Nonzero lattice vectors up to sign.
pub fn canonical_count(desc: &SpectrumDescriptor) -> BigUint {
    (lattice_size(desc) - BigUint::one()) / BigUint::from(2u32)
}

fn size_within_cap(desc: &SpectrumDescriptor, cap: u64) -> Result<usize> {
    let size = lattice_size(desc);
    match size.to_u64() {
        Some(s) if s <= cap => Ok(s as usize),
        _ => Err(Error::CapExceeded { size, cap }),
    }
}

/// Lexicographic walk over the box `∏[−ω_max(i), ω_max(i)]`.
#[derive(Debug, Clone)]
pub struct LatticeIter {
    omega_max: Vec<i64>,
    next: Option<Vec<i64>>,
}

impl Iterator for LatticeIter {
    type Item = FrequencyVector;

    fn next(&mut self) -> Option<FrequencyVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut advanced = false;
        for i in (0..succ.len()).rev() {
            if succ[i] < self.omega_max[i] {
                succ[i] += 1;
                advanced = true;
                break;
            }
            succ[i] = -self.omega_max[i];
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(FrequencyVector(current))
    }
}

pub fn enumerate_lattice(desc: &SpectrumDescriptor, cap: u64) -> Result<LatticeIter> {
    size_within_cap(desc, cap)?;
    let omega_max: Vec<i64> = desc.omega_max.iter().map(|&w| w as i64).collect();
    let start = omega_max.iter().map(|w| -w).collect();
    Ok(LatticeIter { omega_max, next: Some(start) })
}

/// Canonical nonzero lattice vectors, lexicographic.
pub fn enumerate_canonical(desc: &SpectrumDescriptor, cap: u64) -> Result<Vec<FrequencyVector>> {
    Ok(enumerate_lattice(desc, cap)?
        .filter(|w| !w.is_zero() && w.is_canonical())
        .collect())
}

/// Lattice size up to which `sample_distinct` may fall back to enumeration.
const ENUMERATION_FALLBACK_CAP: u64 = 20_000_000;

/// Draws `count` distinct canonical nonzero frequencies.
///
/// Components are uniform integers on `[−ω_max(i), ω_max(i)]`; draws are
/// folded onto their canonical sign and duplicates or the zero vector are
/// rejected. The output for `count` is a prefix of the output for any larger
/// count under the same seed, as long as rejection sampling succeeds.
pub fn sample_distinct(desc: &SpectrumDescriptor, count: usize, seed: u64) -> Result<Vec<FrequencyVector>> {
    if count == 0 {
        return Err(Error::InvalidParameter("number of frequencies must be positive".into()));
    }
    let available = canonical_count(desc);
    if BigUint::from(count) > available {
        return Err(Error::InsufficientSpectrum { requested: count, available });
    }

    let mut rng = seed::rng(seed);
    let mut chosen = Vec::with_capacity(count);
    let mut seen = HashSet::with_capacity(count);
    let max_attempts = 100 * count;
    let mut attempts = 0;
    while chosen.len() < count && attempts < max_attempts {
        attempts += 1;
        let draw = FrequencyVector(
            desc.omega_max
                .iter()
                .map(|&w| rng.random_range(-(w as i64)..=w as i64))
                .collect(),
        );
        if draw.is_zero() {
            continue;
        }
        let canon = draw.canonical();
        if seen.insert(canon.clone()) {
            chosen.push(canon);
        }
    }

    if chosen.len() < count {
        let mut rest: Vec<FrequencyVector> = enumerate_canonical(desc, ENUMERATION_FALLBACK_CAP)
            .map_err(|_| Error::InsufficientSpectrum { requested: count, available: canonical_count(desc) })?
            .into_iter()
            .filter(|w| !seen.contains(w))
            .collect();
        rest.shuffle(&mut rng);
        chosen.extend(rest.into_iter().take(count - chosen.len()));
    }
    Ok(chosen)
}

/// Real-valued frequencies drawn uniformly from `∏[−ω_max(i), ω_max(i)]`,
/// folded to a positive first component. Comparison mode only.
pub fn sample_continuous(desc: &SpectrumDescriptor, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidParameter("number of frequencies must be positive".into()));
    }
    let mut rng = seed::rng(seed);
    Ok((0..count)
        .map(|_| {
            let mut w: Vec<f64> = desc
                .omega_max
                .iter()
                .map(|&m| if m == 0 { 0.0 } else { rng.random_range(-(m as f64)..=m as f64) })
                .collect();
            if w.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0) {
                w.iter_mut().for_each(|c| *c = -*c);
            }
            w
        })
        .collect())
}

/// Cartesian product of `{2πk / (2ω_max(i) + 1)}`, first feature slowest.
pub fn full_grid(desc: &SpectrumDescriptor, cap: u64) -> Result<Grid> {
    let total = size_within_cap(desc, cap)?;
    let counts = desc.per_feature_counts();
    let axes: Vec<Vec<f64>> = counts
        .iter()
        .map(|&t| (0..t).map(|k| TAU * k as f64 / t as f64).collect())
        .collect();
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; counts.len()];
    for _ in 0..total {
        points.push(idx.iter().zip(&axes).map(|(&k, axis)| axis[k]).collect());
        for i in (0..idx.len()).rev() {
            idx[i] += 1;
            if idx[i] < counts[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(Grid { points, per_feature_counts: counts })
}

/// Root-mean-square frequency norm `σ_p` over the canonical lattice.
///
/// Exact when the lattice has at most `cap` vectors, otherwise estimated from
/// `samples` uniform nonzero lattice draws.
pub fn rms_frequency_norm(desc: &SpectrumDescriptor, cap: u64, samples: usize, seed: u64) -> f64 {
    if lattice_size(desc).to_u64().is_some_and(|s| s <= cap) {
        let canon = enumerate_canonical(desc, cap).expect("size checked");
        if canon.is_empty() {
            return 0.0;
        }
        let total: f64 = canon.iter().map(|w| w.norm_sqr() as f64).sum();
        return (total / canon.len() as f64).sqrt();
    }
    let mut rng = seed::rng(seed);
    let mut total = 0.0;
    let mut taken = 0usize;
    while taken < samples {
        let sq: i64 = desc
            .omega_max
            .iter()
            .map(|&w| {
                let c = rng.random_range(-(w as i64)..=w as i64);
                c * c
            })
            .sum();
        if sq != 0 {
            total += sq as f64;
            taken += 1;
        }
    }
    (total / samples as f64).sqrt()
}
