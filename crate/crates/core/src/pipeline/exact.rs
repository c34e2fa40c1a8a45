//! Exact surrogation: sample the circuit on the full DFT grid and fit every
//! lattice frequency.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::qsim::{fingerprint, CircuitConfig, NoiseConfig, ParameterSet};
use crate::spectrum::{enumerate_lattice, full_grid, lattice_size, omega_max_of};
use crate::surrogate::{build_complex_design, fit_complex, SurrogateMode, SurrogateModel};

use super::{estimate_memory, evaluate_model, DEFAULT_BYTES_PER_ENTRY};

/// Recovers the circuit's full Fourier series.
///
/// Fails with [`Error::ExactInfeasible`] when the lattice exceeds `cap`.
pub fn surrogate_exact(
    config: &CircuitConfig,
    params: &ParameterSet,
    cap: u64,
    rcond: f64,
) -> Result<SurrogateModel> {
    config.validate()?;
    params.validate(config)?;
    let desc = omega_max_of(config);
    if lattice_size(&desc).to_u64().is_none_or(|s| s > cap) {
        return Err(Error::ExactInfeasible {
            cap,
            estimate: Box::new(estimate_memory(config, DEFAULT_BYTES_PER_ENTRY)),
        });
    }
    let grid = full_grid(&desc, cap)?;
    let freqs: Vec<_> = enumerate_lattice(&desc, cap)?.collect();
    let targets = evaluate_model(config, params, &grid.points, &NoiseConfig::noiseless())?;
    let design = build_complex_design(&grid.points, &freqs)?;
    let fit = fit_complex(&design, &targets, rcond)?;
    let mut model = SurrogateModel::from_complex_fit(&design, &fit, desc, SurrogateMode::Exact)?;
    model.source = Some(fingerprint(config, params));
    Ok(model)
}
