//! Error-rate specifications and the rejection rules built on adjusted
//! p-values.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{ascending_order, validate_pvalues};
use crate::error::{Error, Result};

/// The error rate controlled for false edge inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ErrorRate {
    /// Probability of at least one false edge.
    Fwer,
    /// Probability of more than `k` false edges.
    Gfwer { k: usize },
    /// Probability that more than a fraction `lambda` of the selected edges
    /// is false.
    Tppfp { lambda: f64 },
    /// Expected fraction of false edges among the selected ones.
    Fdr,
}

impl ErrorRate {
    /// Whether decisions are made from adjusted p-values (all rates except
    /// FDR, whose step-up rule reads unadjusted ones).
    pub fn uses_adjusted(self) -> bool {
        !matches!(self, ErrorRate::Fdr)
    }
}

impl fmt::Display for ErrorRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorRate::Fwer => f.write_str("fwer"),
            ErrorRate::Gfwer { k } => write!(f, "gfwer:{k}"),
            ErrorRate::Tppfp { lambda } => write!(f, "tppfp:{lambda}"),
            ErrorRate::Fdr => f.write_str("fdr"),
        }
    }
}

impl FromStr for ErrorRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown error rate {s:?}; expected fwer, gfwer:K, tppfp:L or fdr"));
        let (kind, arg) = match s.split_once(':') {
            Some((kind, arg)) => (kind, Some(arg)),
            None => (s, None),
        };
        let rate = match (kind, arg) {
            ("fwer", None) => ErrorRate::Fwer,
            ("fdr", None) => ErrorRate::Fdr,
            ("gfwer", Some(k)) => ErrorRate::Gfwer {
                k: k.trim().parse().map_err(|_| Error::InvalidParameter(format!("gfwer needs a count k >= 0, got {k:?}")))?,
            },
            ("tppfp", Some(l)) => ErrorRate::Tppfp {
                lambda: l.trim().parse().map_err(|_| Error::InvalidParameter(format!("tppfp needs a fraction, got {l:?}")))?,
            },
            _ => return Err(bad()),
        };
        rate.validate()?;
        Ok(rate)
    }
}

impl ErrorRate {
    fn validate(self) -> Result<()> {
        match self {
            ErrorRate::Tppfp { lambda } if !(0.0..1.0).contains(&lambda) => {
                Err(Error::InvalidParameter(format!("tppfp fraction must lie in [0, 1), got {lambda}")))
            }
            _ => Ok(()),
        }
    }
}

/// An error rate together with the level it is controlled at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRateSpec {
    pub rate: ErrorRate,
    pub alpha: f64,
}

impl ErrorRateSpec {
    pub fn new(rate: ErrorRate, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        rate.validate()?;
        Ok(ErrorRateSpec { rate, alpha })
    }

    pub fn fwer(alpha: f64) -> Result<Self> {
        Self::new(ErrorRate::Fwer, alpha)
    }

    /// Indices of the rejected hypotheses, sorted. `adjusted` drives FWER,
    /// GFWER and TPPFP; FDR uses the unadjusted `raw` values.
    pub fn decide(&self, raw: &[f64], adjusted: &[f64]) -> Result<Vec<usize>> {
        let fwer = || reject_set(adjusted, self.alpha);
        match self.rate {
            ErrorRate::Fwer => fwer(),
            ErrorRate::Gfwer { k } => augment_gfwer(&fwer()?, adjusted, k),
            ErrorRate::Tppfp { lambda } => augment_tppfp(&fwer()?, adjusted, lambda),
            ErrorRate::Fdr => fdr_by(raw, self.alpha),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Indices with adjusted p-value at most `alpha`.
pub fn reject_set(adjusted: &[f64], alpha: f64) -> Result<Vec<usize>> {
    check_alpha(alpha)?;
    validate_pvalues(adjusted)?;
    Ok((0..adjusted.len()).filter(|&a| adjusted[a] <= alpha).collect())
}

/// Adds the `extra` most significant hypotheses outside `rejected`, ties
/// broken by index.
fn augment(rejected: &[usize], adjusted: &[f64], extra: usize) -> Result<Vec<usize>> {
    validate_pvalues(adjusted)?;
    if let Some(&a) = rejected.iter().find(|&&a| a >= adjusted.len()) {
        return Err(Error::InvalidParameter(format!("rejected index {a} out of range")));
    }
    let mut taken = vec![false; adjusted.len()];
    for &a in rejected {
        taken[a] = true;
    }
    let additions: Vec<usize> = ascending_order(adjusted).into_iter().filter(|&a| !taken[a]).take(extra).collect();
    for a in additions {
        taken[a] = true;
    }
    Ok((0..adjusted.len()).filter(|&a| taken[a]).collect())
}

/// k-GFWER control: the FWER rejections plus the `k` next most significant
/// hypotheses.
pub fn augment_gfwer(rejected: &[usize], adjusted: &[f64], k: usize) -> Result<Vec<usize>> {
    augment(rejected, adjusted, k)
}

/// Number of additions keeping `added / (added + r0) <= lambda`.
pub(crate) fn tppfp_additions(r0: usize, lambda: f64) -> usize {
    let bound = lambda * r0 as f64 / (1.0 - lambda);
    // guard against 4.999... from rounding when the bound is an integer
    let mut a = (bound + 1e-9).floor() as usize;
    while a > 0 && (a as f64) > lambda * (a + r0) as f64 + 1e-12 {
        a -= 1;
    }
    a
}

/// λ-TPPFP control: the FWER rejections plus `⌊λ r0 / (1 - λ)⌋` further
/// hypotheses, `r0` being the number of FWER rejections.
pub fn augment_tppfp(rejected: &[usize], adjusted: &[f64], lambda: f64) -> Result<Vec<usize>> {
    ErrorRate::Tppfp { lambda }.validate()?;
    augment(rejected, adjusted, tppfp_additions(rejected.len(), lambda))
}

/// Benjamini–Yekutieli step-up on unadjusted p-values.
pub fn fdr_by(p: &[f64], alpha: f64) -> Result<Vec<usize>> {
    check_alpha(alpha)?;
    validate_pvalues(p)?;
    let m = p.len();
    let harmonic: f64 = (1..=m).map(|i| 1.0 / i as f64).sum();
    let order = ascending_order(p);
    let cutoff = (0..m)
        .rev()
        .find(|&a| p[order[a]] <= (a + 1) as f64 * alpha / (m as f64 * harmonic))
        .map_or(0, |a| a + 1);
    let mut out: Vec<usize> = order[..cutoff].to_vec();
    out.sort_unstable();
    Ok(out)
}
