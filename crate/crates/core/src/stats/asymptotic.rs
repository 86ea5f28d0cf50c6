//! Asymptotic covariance of vectors of sample (partial) correlations.
//!
//! Two engines: closed-form expressions for ordinary and saturated partial
//! correlations, and a numerical delta method that handles arbitrary
//! per-pair conditioning sets (the DAG case in particular).

use nalgebra::DMatrix;
use serde::Serialize;

use super::partial_correlation;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    DeltaMethod,
}

/// Which correlations the closed form describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    /// Ordinary correlations, `C(i, j) = ∅`.
    Marginal,
    /// Saturated partial correlations, `C(i, j) = V ∖ {i, j}`.
    Saturated,
}

/// Covariance matrix indexed by a list of vertex pairs.
#[derive(Debug, Clone)]
pub struct AsymptoticCovariance {
    pub matrix: DMatrix<f64>,
    pub provenance: Provenance,
}

/// Pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn pair_index(p: usize) -> Vec<(usize, usize)> {
    (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect()
}

/// Pairs `(i, j)` with `i <= j`, in lexicographic order.
fn upper_pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect()
}

/// Isserlis matrix `σ_iu σ_jv + σ_iv σ_ju` over pairs `i <= j`, `u <= v`:
/// the asymptotic covariance of `√n (S - Σ)`.
pub fn isserlis(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    linalg::check_symmetric(sigma)?;
    let pairs = upper_pairs(sigma.nrows());
    let s = |a: usize, b: usize| sigma[(a, b)];
    Ok(DMatrix::from_fn(pairs.len(), pairs.len(), |x, y| {
        let ((i, j), (u, v)) = (pairs[x], pairs[y]);
        s(i, u) * s(j, v) + s(i, v) * s(j, u)
    }))
}

/// Closed-form asymptotic covariance of `√n (r - ρ)` for the vector of
/// ordinary correlations with correlation matrix `rho`, indexed by
/// [`pair_index`].
pub fn omega_from_correlations(rho: &DMatrix<f64>) -> DMatrix<f64> {
    let pairs = pair_index(rho.nrows());
    let r = |a: usize, b: usize| rho[(a, b)];
    DMatrix::from_fn(pairs.len(), pairs.len(), |x, y| {
        let ((i, j), (k, l)) = (pairs[x], pairs[y]);
        if (i, j) == (k, l) {
            let q = 1.0 - r(i, j).powi(2);
            return q * q;
        }
        // shared endpoint s with pairs (s, a) and (s, b)
        let shared = if i == k {
            Some((i, j, l))
        } else if i == l {
            Some((i, j, k))
        } else if j == k {
            Some((j, i, l))
        } else if j == l {
            Some((j, i, k))
        } else {
            None
        };
        match shared {
            Some((s, a, b)) => {
                let (rsa, rsb, rab) = (r(s, a), r(s, b), r(a, b));
                -0.5 * rsa * rsb * (1.0 - rsa * rsa - rsb * rsb - rab * rab)
                    + rab * (1.0 - rsa * rsa - rsb * rsb)
            }
            None => {
                let (rij, rkl) = (r(i, j), r(k, l));
                let (rik, ril, rjk, rjl) = (r(i, k), r(i, l), r(j, k), r(j, l));
                0.5 * rij * rkl * (rik * rik + ril * ril + rjk * rjk + rjl * rjl)
                    + rik * rjl
                    + ril * rjk
                    - rik * rjk * rkl
                    - rij * rik * ril
                    - rij * rjk * rjl
                    - ril * rjl * rkl
            }
        }
    })
}

fn correlation_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d: Vec<f64> = (0..m.nrows()).map(|k| m[(k, k)].sqrt()).collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] / (d[a] * d[b]))
}

/// Closed-form asymptotic covariance over all pairs of [`pair_index`].
///
/// Saturated partial correlations are the negated correlations of `Σ⁻¹`,
/// whose sample version has Isserlis covariance in `Σ⁻¹`. The marginal
/// formulas therefore apply with `ρ_ij` replaced by the `(i, j)`
/// correlation of `Σ⁻¹`, i.e. by `-ρ_{ij·V∖{i,j}}`; the sign matters for
/// the odd-degree terms.
pub fn asym_cov_closed(sigma: &DMatrix<f64>, mode: CorrelationMode) -> Result<AsymptoticCovariance> {
    linalg::check_symmetric(sigma)?;
    let rho = match mode {
        CorrelationMode::Marginal => {
            linalg::cholesky(sigma, "covariance")?;
            correlation_matrix(sigma)
        }
        CorrelationMode::Saturated => correlation_matrix(&linalg::spd_inverse(sigma, "covariance")?),
    };
    Ok(AsymptoticCovariance { matrix: omega_from_correlations(&rho), provenance: Provenance::ClosedForm })
}

/// A partial correlation `ρ_{ij·cond}` in a vector of test targets.
#[derive(Debug, Clone, Copy)]
pub struct PairTarget<'a> {
    pub i: usize,
    pub j: usize,
    pub cond: &'a [usize],
}

fn target_vector(s: &DMatrix<f64>, targets: &[PairTarget<'_>]) -> Result<Vec<f64>> {
    targets.iter().map(|t| partial_correlation(s, t.i, t.j, t.cond)).collect()
}

/// Delta-method asymptotic covariance `J Iss(Σ) Jᵗ`, with `J` the Jacobian
/// of `vech(S) ↦ (r_{ij·C(i,j)})` by central differences.
pub fn asym_cov_delta(sigma: &DMatrix<f64>, targets: &[PairTarget<'_>]) -> Result<AsymptoticCovariance> {
    let iss = isserlis(sigma)?;
    linalg::cholesky(sigma, "covariance")?;
    let p = sigma.nrows();
    let pairs = upper_pairs(p);
    let step = f64::EPSILON.cbrt();
    let mut jac = DMatrix::zeros(targets.len(), pairs.len());
    let mut work = sigma.clone();
    for (col, &(u, v)) in pairs.iter().enumerate() {
        let base = sigma[(u, v)];
        let h = step * base.abs().max(1.0);
        let mut eval = |x: f64| -> Result<Vec<f64>> {
            work[(u, v)] = x;
            work[(v, u)] = x;
            target_vector(&work, targets)
        };
        let plus = eval(base + h)?;
        let minus = eval(base - h)?;
        work[(u, v)] = base;
        work[(v, u)] = base;
        for (row, (a, b)) in plus.iter().zip(&minus).enumerate() {
            jac[(row, col)] = (a - b) / (2.0 * h);
        }
    }
    let matrix = &jac * iss * jac.transpose();
    linalg::check_finite(&matrix, "delta-method covariance")?;
    Ok(AsymptoticCovariance { matrix, provenance: Provenance::DeltaMethod })
}

/// Correlation matrix of an asymptotic covariance: the asymptotic
/// covariance of the Fisher-z transformed vector.
pub fn z_scale(omega: &AsymptoticCovariance) -> Result<AsymptoticCovariance> {
    let m = &omega.matrix;
    if let Some(k) = (0..m.nrows()).find(|&k| !(m[(k, k)] > 0.0)) {
        return Err(Error::NotPositiveDefinite(format!("asymptotic variance {k} is not positive")));
    }
    let mut c = correlation_matrix(m);
    for k in 0..c.nrows() {
        c[(k, k)] = 1.0;
    }
    Ok(AsymptoticCovariance { matrix: c, provenance: omega.provenance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_like_sigma() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.6, -0.3, 0.4, //
                0.6, 1.5, 0.2, -0.5, //
                -0.3, 0.2, 1.0, 0.1, //
                0.4, -0.5, 0.1, 1.8,
            ],
        )
    }

    #[test]
    fn isserlis_entries() {
        let iss = isserlis(&DMatrix::identity(2, 2)).unwrap();
        // pairs (0,0), (0,1), (1,1)
        assert_eq!(iss[(0, 0)], 2.0);
        assert_eq!(iss[(1, 1)], 1.0);
        assert_eq!(iss[(0, 2)], 0.0);
        let iss2 = isserlis(&(DMatrix::identity(2, 2) * 2.0)).unwrap();
        assert_eq!(iss2[(0, 0)], 8.0);
        let full = isserlis(&random_like_sigma()).unwrap();
        assert_eq!(full, full.transpose());
        assert!(isserlis(&DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0])).is_err());
    }

    #[test]
    fn closed_form_special_cases() {
        let omega = asym_cov_closed(&DMatrix::identity(4, 4), CorrelationMode::Marginal).unwrap();
        assert_eq!(omega.matrix, DMatrix::identity(6, 6));

        let mut rho = DMatrix::identity(3, 3);
        rho[(0, 1)] = 0.5;
        rho[(1, 0)] = 0.5;
        let om = omega_from_correlations(&rho);
        assert!((om[(0, 0)] - 0.5625).abs() < 1e-15);

        // only ρ_jl non-zero for pairs (i, j) = (0, 1), (i, l) = (0, 2)
        let mut rho = DMatrix::identity(3, 3);
        rho[(1, 2)] = 0.3;
        rho[(2, 1)] = 0.3;
        let om = omega_from_correlations(&rho);
        assert!((om[(0, 1)] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn delta_matches_closed_form() {
        let sigma = random_like_sigma();
        let pairs = pair_index(4);
        let marginal: Vec<PairTarget> = pairs.iter().map(|&(i, j)| PairTarget { i, j, cond: &[] }).collect();
        let closed = asym_cov_closed(&sigma, CorrelationMode::Marginal).unwrap();
        let delta = asym_cov_delta(&sigma, &marginal).unwrap();
        assert!((&closed.matrix - &delta.matrix).amax() < 1e-6);

        let rest: Vec<Vec<usize>> =
            pairs.iter().map(|&(i, j)| (0..4).filter(|&k| k != i && k != j).collect()).collect();
        let saturated: Vec<PairTarget> =
            pairs.iter().zip(&rest).map(|(&(i, j), c)| PairTarget { i, j, cond: c }).collect();
        let closed = asym_cov_closed(&sigma, CorrelationMode::Saturated).unwrap();
        let delta = asym_cov_delta(&sigma, &saturated).unwrap();
        assert!((&closed.matrix - &delta.matrix).amax() < 1e-6);
    }

    #[test]
    fn delta_of_identity_is_identity() {
        let pairs = pair_index(3);
        let t: Vec<PairTarget> = pairs.iter().map(|&(i, j)| PairTarget { i, j, cond: &[] }).collect();
        let d = asym_cov_delta(&DMatrix::identity(3, 3), &t).unwrap();
        assert!((d.matrix - DMatrix::<f64>::identity(3, 3)).amax() < 1e-8);
    }

    #[test]
    fn z_scale_normalizes() {
        let om = AsymptoticCovariance {
            matrix: DMatrix::from_row_slice(2, 2, &[4.0, 6.0, 6.0, 9.0]),
            provenance: Provenance::ClosedForm,
        };
        let c = z_scale(&om).unwrap();
        assert!((c.matrix - DMatrix::from_element(2, 2, 1.0)).amax() < 1e-15);
        let zero = AsymptoticCovariance { matrix: DMatrix::zeros(2, 2), provenance: Provenance::ClosedForm };
        assert!(z_scale(&zero).is_err());
    }
}
