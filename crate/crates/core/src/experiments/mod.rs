//! Experiment drivers behind the command-line tool: requirement sweeps, the
//! trained-model showcase and straight-line extrapolation.

mod linear;
mod showcase;
mod sweep;

pub use linear::*;
pub use showcase::*;
pub use sweep::*;

/// Median of a non-empty slice; `NaN` sorts last.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
