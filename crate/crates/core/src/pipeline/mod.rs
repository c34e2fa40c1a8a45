//! Surrogation procedures, the circuit trainer, resource estimates and the
//! random-feature sample-complexity bounds.

mod bounds;
mod exact;
mod resources;
mod rff;
mod train;

pub use bounds::*;
pub use exact::*;
pub use resources::*;
pub use rff::*;
pub use train::*;

use rayon::prelude::*;

use crate::error::Result;
use crate::qsim::{self, CircuitConfig, NoiseConfig, ParameterSet};

/// Default lattice cap for exact surrogation.
pub const DEFAULT_EXACT_CAP: u64 = 1_000_000;

/// Evaluates `f_Θ` at every point. Point `j` uses noise stream `j`, so the
/// result does not depend on thread scheduling.
pub fn evaluate_model(
    config: &CircuitConfig,
    params: &ParameterSet,
    points: &[Vec<f64>],
    noise: &NoiseConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    params.validate(config)?;
    noise.validate()?;
    for x in points {
        qsim::check_point(config, x)?;
    }
    Ok(points
        .par_iter()
        .enumerate()
        .map(|(j, x)| qsim::expectation_unchecked(config, params, x, &noise.for_stream(j as u64)))
        .collect())
}
