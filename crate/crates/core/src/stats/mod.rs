//! Sample moments, (partial) correlations, Fisher-z inference and the
//! asymptotic covariance of correlation vectors.

mod asymptotic;
mod dataset;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg;

pub use asymptotic::{
    asym_cov_closed, asym_cov_delta, isserlis, omega_from_correlations, pair_index, z_scale,
    AsymptoticCovariance, CorrelationMode, PairTarget, Provenance,
};
pub use dataset::Dataset;

/// Smallest effective sample size for which the Fisher-z variance
/// `1 / (n - 3)` is defined and positive.
pub const MIN_Z_SAMPLE_SIZE: usize = 4;

/// Sufficient statistics of a Gaussian sample.
#[derive(Debug, Clone)]
pub struct CovarianceSummary {
    pub n: usize,
    pub mean: DVector<f64>,
    /// Unbiased sample covariance (divisor `n - 1`).
    pub cov: DMatrix<f64>,
}

impl CovarianceSummary {
    pub fn p(&self) -> usize {
        self.cov.nrows()
    }
}

/// Sample mean and covariance; fails unless the covariance is positive
/// definite.
pub fn summarize(data: &Dataset) -> Result<CovarianceSummary> {
    let (n, p) = (data.n(), data.p());
    if n < p + 1 {
        return Err(Error::InsufficientSamples { n, needed: p + 1 });
    }
    let x = data.values();
    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centered.tr_mul(&centered) / (n as f64 - 1.0);
    check_positive_definite(&cov, "sample covariance")?;
    Ok(CovarianceSummary { n, mean, cov })
}

/// Cholesky-based definiteness check that also rejects pivots that are
/// rounding noise relative to the diagonal.
pub(crate) fn check_positive_definite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let chol = linalg::cholesky(m, what)?;
    let l = chol.l_dirty();
    for k in 0..m.nrows() {
        if l[(k, k)] * l[(k, k)] <= 1e-12 * m[(k, k)] {
            return Err(Error::NotPositiveDefinite(what.to_string()));
        }
    }
    Ok(())
}

fn check_pair(cov: &DMatrix<f64>, i: usize, j: usize) -> Result<()> {
    let p = cov.nrows();
    for v in [i, j] {
        if v >= p {
            return Err(Error::VertexOutOfRange { vertex: v, p });
        }
    }
    if i == j {
        return Err(Error::InvalidParameter(format!("correlation needs two distinct indices, got {i}")));
    }
    Ok(())
}

/// `σ_ij / √(σ_ii σ_jj)`.
pub fn correlation(cov: &DMatrix<f64>, i: usize, j: usize) -> Result<f64> {
    check_pair(cov, i, j)?;
    let d = cov[(i, i)] * cov[(j, j)];
    if d <= 0.0 || !d.is_finite() {
        return Err(Error::NotPositiveDefinite(format!("zero variance at {i} or {j}")));
    }
    Ok(cov[(i, j)] / d.sqrt())
}

/// Partial correlation of `i` and `j` given `cond`, from the inverse of the
/// `(cond ∪ {i, j})` principal submatrix.
pub fn partial_correlation(cov: &DMatrix<f64>, i: usize, j: usize, cond: &[usize]) -> Result<f64> {
    check_pair(cov, i, j)?;
    if cond.is_empty() {
        return correlation(cov, i, j);
    }
    let p = cov.nrows();
    if let Some(&v) = cond.iter().find(|&&v| v >= p) {
        return Err(Error::VertexOutOfRange { vertex: v, p });
    }
    if cond.contains(&i) || cond.contains(&j) {
        return Err(Error::OverlappingSets);
    }
    let mut idx = Vec::with_capacity(cond.len() + 2);
    idx.extend([i, j]);
    idx.extend_from_slice(cond);
    let k = linalg::spd_inverse(&linalg::principal_submatrix(cov, &idx), "conditioning submatrix")?;
    Ok(-k[(0, 1)] / (k[(0, 0)] * k[(1, 1)]).sqrt())
}

/// Fisher's z-transform `½ ln((1 + r) / (1 - r))`.
pub fn fisher_z(r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::InvalidCorrelation(r));
    }
    Ok(r.atanh())
}

/// `n - |C|`, required to leave at least [`MIN_Z_SAMPLE_SIZE`].
pub fn effective_sample_size(n: usize, cond_len: usize) -> Result<usize> {
    let n_eff = n as i64 - cond_len as i64;
    if n_eff < MIN_Z_SAMPLE_SIZE as i64 {
        return Err(Error::SampleSizeTooSmall { n_eff, min: MIN_Z_SAMPLE_SIZE });
    }
    Ok(n_eff as usize)
}

/// Standardized Fisher-z statistic `√(n_eff - 3) · z`.
pub fn z_statistic(z: f64, n_eff: usize) -> Result<f64> {
    if n_eff < MIN_Z_SAMPLE_SIZE {
        return Err(Error::SampleSizeTooSmall { n_eff: n_eff as i64, min: MIN_Z_SAMPLE_SIZE });
    }
    Ok((n_eff as f64 - 3.0).sqrt() * z)
}

/// Two-sided normal tail probability `2 (1 - Φ(|x|))`.
pub fn normal_two_sided(x: f64) -> f64 {
    erfc(x.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Inverse of [`normal_two_sided`]: the `|x|` whose two-sided tail
/// probability is `p`.
pub fn normal_two_sided_quantile(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidPValue { index: 0, value: p });
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    let normal = Normal::standard();
    Ok((-normal.inverse_cdf(p / 2.0)).max(0.0))
}

/// Unadjusted p-value `2 [1 - Φ(√(n_eff - 3) |z|)]`.
pub fn z_pvalue(z: f64, n_eff: usize) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::NonFinite("z statistic".into()));
    }
    Ok(normal_two_sided(z_statistic(z, n_eff)?))
}

/// Exact null p-value from the t-distribution with `n_eff - 2` degrees of
/// freedom.
pub fn t_pvalue(r: f64, n_eff: usize) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::InvalidCorrelation(r));
    }
    if n_eff < 3 {
        return Err(Error::SampleSizeTooSmall { n_eff: n_eff as i64, min: 3 });
    }
    let df = n_eff as f64 - 2.0;
    let t = df.sqrt() * r / (1.0 - r * r).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Covariance matrix with a vanishing marginal correlation that is not
    /// globally faithful; its inverse is integral.
    fn sigma3() -> DMatrix<f64> {
        DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.0])
    }

    #[test]
    fn summary_of_two_points() {
        let d = Dataset::new(vec!["a".into()], DMatrix::from_row_slice(2, 1, &[0.0, 2.0])).unwrap();
        let s = summarize(&d).unwrap();
        assert_eq!(s.mean[0], 1.0);
        assert_eq!(s.cov[(0, 0)], 2.0);
    }

    #[test]
    fn summary_of_unit_rows() {
        let d = Dataset::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]),
        )
        .unwrap();
        let s = summarize(&d).unwrap();
        let third = 1.0 / 3.0;
        assert!((s.mean[0] - third).abs() < 1e-15 && (s.mean[1] - third).abs() < 1e-15);
        let expected = DMatrix::from_row_slice(2, 2, &[third, -1.0 / 6.0, -1.0 / 6.0, third]);
        assert!((s.cov - expected).amax() < 1e-15);
    }

    #[test]
    fn summary_rejects_degenerate_data() {
        let constant = Dataset::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(4, 2, &[1.0, 0.3, 1.0, 0.1, 1.0, 0.7, 1.0, 0.2]),
        )
        .unwrap();
        assert!(matches!(summarize(&constant), Err(Error::NotPositiveDefinite(_))));
        let short = Dataset::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 2.0, 0.1]),
        )
        .unwrap();
        assert!(matches!(summarize(&short), Err(Error::InsufficientSamples { n: 2, needed: 3 })));
    }

    #[test]
    fn correlations_of_sigma3() {
        let s = sigma3();
        assert_eq!(correlation(&s, 0, 2).unwrap(), 0.0);
        assert!((correlation(&s, 0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(correlation(&DMatrix::identity(3, 3), 1, 2).unwrap(), 0.0);
        assert!(correlation(&DMatrix::zeros(2, 2), 0, 1).is_err());
    }

    #[test]
    fn partial_correlations_of_sigma3() {
        let s = sigma3();
        let r12 = partial_correlation(&s, 0, 1, &[2]).unwrap();
        assert!((r12 - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        let r13 = partial_correlation(&s, 0, 2, &[1]).unwrap();
        assert!((r13 + 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(partial_correlation(&s, 0, 1, &[]).unwrap(), correlation(&s, 0, 1).unwrap());
        assert!(matches!(partial_correlation(&s, 0, 1, &[1]), Err(Error::OverlappingSets)));
    }

    #[test]
    fn fisher_z_values() {
        assert_eq!(fisher_z(0.0).unwrap(), 0.0);
        assert!((fisher_z(0.5).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-12);
        assert!((fisher_z(-0.3).unwrap() + fisher_z(0.3).unwrap()).abs() < 1e-15);
        assert!(fisher_z(1.0).is_err());
        assert!(fisher_z(f64::NAN).is_err());
    }

    #[test]
    fn effective_sizes() {
        assert_eq!(effective_sample_size(118, 0).unwrap(), 118);
        assert_eq!(effective_sample_size(118, 11).unwrap(), 107);
        assert_eq!(effective_sample_size(30, 1).unwrap(), 29);
        assert!(effective_sample_size(6, 3).is_err());
    }

    #[test]
    fn z_pvalues() {
        assert_eq!(z_pvalue(0.0, 10).unwrap(), 1.0);
        // 2 (1 - Φ(2.5))
        assert!((z_pvalue(0.5, 28).unwrap() - 0.012_419_330_651_552_2).abs() < 1e-12);
        assert_eq!(z_pvalue(f64::INFINITY, 10).unwrap(), 0.0);
        assert!(z_pvalue(0.1, 3).is_err());
    }

    #[test]
    fn two_sided_quantiles() {
        assert!((normal_two_sided_quantile(0.05).unwrap() - 1.959_963_984_540_054).abs() < 1e-9);
        assert_eq!(normal_two_sided_quantile(0.0).unwrap(), f64::INFINITY);
        assert_eq!(normal_two_sided_quantile(1.0).unwrap(), 0.0);
        for p in [1e-8, 0.003, 0.4] {
            assert!((normal_two_sided(normal_two_sided_quantile(p).unwrap()) - p).abs() < 1e-9 * p);
        }
        assert!(normal_two_sided_quantile(1.2).is_err());
    }

    #[test]
    fn t_pvalues() {
        assert!((t_pvalue(0.0, 20).unwrap() - 1.0).abs() < 1e-12);
        // t = √9 · 0.5 / √0.75 = √3 on 9 degrees of freedom
        assert!((t_pvalue(0.5, 11).unwrap() - 0.117_306_803).abs() < 1e-8);
        assert!(t_pvalue(0.999_999_9, 50).unwrap() < 1e-12);
        assert!(t_pvalue(1.0, 50).is_err());
    }
}
