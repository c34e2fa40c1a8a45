//! Minimum-norm least squares through a truncated SVD pseudoinverse.
//!
//! The decomposition itself is delegated to `faer`; truncation is relative,
//! so singular values below `rcond · σ_max` are dropped.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative cutoff for discarded singular values.
pub const DEFAULT_RCOND: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LstsqSolution<T: ComplexField> {
    pub coefficients: DVector<T>,
    /// Euclidean norm of `A·c − y`.
    pub residual: f64,
    /// Number of singular values kept.
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// Scalars the pseudoinverse solver accepts.
pub trait SolveScalar: ComplexField<RealField = f64> + Copy {
    /// Thin SVD `A = U Σ Vᴴ`, returned as `(U, σ, V)`.
    fn thin_svd(a: &DMatrix<Self>) -> Result<(DMatrix<Self>, Vec<f64>, DMatrix<Self>)>;
}

macro_rules! impl_solve_scalar {
    ($t:ty, $re:expr) => {
        impl SolveScalar for $t {
            fn thin_svd(a: &DMatrix<Self>) -> Result<(DMatrix<Self>, Vec<f64>, DMatrix<Self>)> {
                let m = faer::Mat::<$t>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
                let svd = m.thin_svd().map_err(|_| Error::SvdFailed)?;
                let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
                let to_na = |f: faer::MatRef<'_, $t>| DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| f[(i, j)]);
                let sigma = (0..s.nrows()).map(|k| $re(s[k])).collect();
                Ok((to_na(u), sigma, to_na(v)))
            }
        }
    };
}

impl_solve_scalar!(f64, |s: f64| s);
impl_solve_scalar!(Complex64, |s: Complex64| s.re);

/// Solves `min ‖A c − y‖²` and returns the minimum-norm minimiser.
pub fn lstsq_pinv<T: SolveScalar>(a: &DMatrix<T>, y: &DVector<T>, rcond: f64) -> Result<LstsqSolution<T>> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput("design matrix"));
    }
    if y.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, got: y.len() });
    }
    if !(rcond > 0.0 && rcond < 1.0) {
        return Err(Error::InvalidParameter(format!("rcond must lie in (0, 1), got {rcond}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("targets"));
    }
    if a.iter().all(|v| v.modulus() == 0.0) {
        return Err(Error::ZeroDesign);
    }

    let (u, sigma, v) = T::thin_svd(a)?;
    let sigma_max = sigma.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = rcond * sigma_max;

    let mut projected = u.ad_mul(y);
    let mut rank = 0;
    for (k, &s) in sigma.iter().enumerate() {
        if s > cutoff {
            projected[k] = projected[k].unscale(s);
            rank += 1;
        } else {
            projected[k] = T::zero();
        }
    }
    let coefficients = v * projected;
    let residual = (a * &coefficients - y).norm();
    let mut singular_values = sigma;
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(LstsqSolution { coefficients, residual, rank, singular_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};
    use num_complex::Complex64;

    #[test]
    fn identity_design_returns_targets() {
        let a = DMatrix::<f64>::identity(4, 4);
        let y = dvector![1.0, -2.0, 0.5, 3.0];
        let sol = lstsq_pinv(&a, &y, DEFAULT_RCOND).unwrap();
        assert!((sol.coefficients - &y).norm() < 1e-14);
        assert!(sol.residual < 1e-14);
    }

    #[test]
    fn rank_one_column_gives_mean() {
        let a = dmatrix![1.0; 1.0];
        let y = dvector![0.0, 2.0];
        let sol = lstsq_pinv(&a, &y, DEFAULT_RCOND).unwrap();
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((sol.residual - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn wide_system_is_minimum_norm() {
        // x + y = 2 → minimum-norm solution (1, 1).
        let a = dmatrix![1.0, 1.0];
        let y = dvector![2.0];
        let sol = lstsq_pinv(&a, &y, DEFAULT_RCOND).unwrap();
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((sol.coefficients[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn duplicate_columns_are_truncated() {
        let a = dmatrix![1.0, 1.0; 2.0, 2.0; 3.0, 3.0];
        let y = dvector![2.0, 4.0, 6.0];
        let sol = lstsq_pinv(&a, &y, DEFAULT_RCOND).unwrap();
        assert_eq!(sol.rank, 1);
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((sol.coefficients[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_square_matches_direct_solve() {
        let a = DMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j + 1 + if i == j { 3 } else { 0 }) as f64, i as f64 - 2.0 * j as f64));
        let y = dvector![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 2.0)];
        let direct = a.clone().lu().solve(&y).unwrap();
        let sol = lstsq_pinv(&a, &y, DEFAULT_RCOND).unwrap();
        assert!((sol.coefficients - direct).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let zero = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(lstsq_pinv(&zero, &dvector![1.0, 1.0], 1e-10), Err(Error::ZeroDesign)));
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(matches!(
            lstsq_pinv(&a, &dvector![f64::NAN, 1.0], 1e-10),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            lstsq_pinv(&a, &dvector![1.0], 1e-10),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(lstsq_pinv(&a, &dvector![1.0, 1.0], 0.0).is_err());
    }
}
