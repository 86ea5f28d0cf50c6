//! Small dense linear-algebra helpers shared by the statistics and
//! Monte-Carlo code.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated before a matrix is rejected as asymmetric.
const SYMMETRY_TOL: f64 = 1e-9;

pub fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSymmetric);
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// Cholesky factorization, failing with `NotPositiveDefinite` on a
/// non-positive pivot.
pub fn cholesky(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    check_finite(m, what)?;
    Cholesky::new(m.clone()).ok_or_else(|| Error::NotPositiveDefinite(what.to_string()))
}

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    Ok(cholesky(m, what)?.inverse())
}

/// Principal submatrix on `idx` (in that order).
pub fn principal_submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// A factor `L` with `L Lᵗ` equal to `m` after symmetrizing and raising
/// eigenvalues below `floor` to `floor`.
///
/// Fails on non-finite input or an eigenvalue more negative than
/// `-1e-6 · max(1, λ_max)`, which no plug-in estimate should produce.
pub fn psd_factor(m: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    check_finite(m, "covariance")?;
    check_symmetric(m)?;
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let top = eig.eigenvalues.max().max(1.0);
    if eig.eigenvalues.min() < -1e-6 * top {
        return Err(Error::NotPositiveDefinite(format!(
            "covariance has eigenvalue {:.3e}",
            eig.eigenvalues.min()
        )));
    }
    let mut factor = eig.eigenvectors;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(floor).sqrt();
        factor.column_mut(k).scale_mut(s);
    }
    Ok(factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_factor_reproduces_matrix() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 2.0, 0.4, 0.6, 0.4, 1.0]);
        let l = psd_factor(&m, 0.0).unwrap();
        assert!((&l * l.transpose() - &m).amax() < 1e-12);
    }

    #[test]
    fn psd_factor_clips_rank_deficient() {
        let ones = DMatrix::from_element(3, 3, 1.0);
        let l = psd_factor(&ones, 1e-10).unwrap();
        assert!((&l * l.transpose() - &ones).amax() < 1e-9);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(psd_factor(&bad, 1e-10).is_err());
    }

    #[test]
    fn cholesky_rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(cholesky(&m, "test"), Err(Error::NotPositiveDefinite(_))));
    }
}
