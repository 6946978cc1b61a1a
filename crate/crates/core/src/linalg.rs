//! Small dense helpers on symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative eigenvalue floor below which a symmetric matrix is treated as
/// singular.
pub const SINGULAR_REL_TOL: f64 = 1e-12;

/// Ridge added when regularization is requested: `1e-10 * trace / K`.
pub fn ridge_size(m: &DMatrix<f64>) -> f64 {
    1e-10 * m.trace() / m.nrows() as f64
}

/// Applies `f` to the eigenvalues of a symmetric positive definite matrix.
///
/// With `ridge` the ridge is added before the singularity check; without it a
/// near-singular input is reported as `SingularGamma0`.
pub fn sym_spectral_map(m: &DMatrix<f64>, ridge: bool, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let k = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let shift = if ridge { ridge_size(&sym) } else { 0.0 };
    let eig = nalgebra::SymmetricEigen::new(sym);
    let max = eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |acc, v| acc.min(*v)) + shift;
    if !(min > SINGULAR_REL_TOL * max) || !min.is_finite() {
        return Err(Error::SingularGamma0 { min_eigenvalue: min });
    }
    let mut out = DMatrix::zeros(k, k);
    for i in 0..k {
        let v = eig.eigenvectors.column(i);
        let s = f(eig.eigenvalues[i] + shift);
        out += s * v * v.transpose();
    }
    Ok(out)
}

pub fn sym_inv_sqrt(m: &DMatrix<f64>, ridge: bool) -> Result<DMatrix<f64>> {
    sym_spectral_map(m, ridge, |v| 1.0 / v.sqrt())
}

pub fn sym_inverse(m: &DMatrix<f64>, ridge: bool) -> Result<DMatrix<f64>> {
    sym_spectral_map(m, ridge, |v| 1.0 / v)
}

/// Column-stacking vectorization.
pub fn vec_of(m: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_root() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let s = sym_inv_sqrt(&m, false).unwrap();
        let id = &s * &m * &s;
        assert!((id - DMatrix::identity(2, 2)).norm() < 1e-12);
        let inv = sym_inverse(&m, false).unwrap();
        assert!((inv * &m - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn singular_detection() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(sym_inv_sqrt(&m, false), Err(Error::SingularGamma0 { .. })));
        assert!(sym_inv_sqrt(&m, true).is_ok());
    }

    #[test]
    fn vec_is_column_major() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vec_of(&m).as_slice(), &[1.0, 3.0, 2.0, 4.0]);
    }
}
