//! p-value adjustments for family-wise error control and the error-rate
//! layer (k-GFWER and λ-TPPFP by augmentation, FDR by the
//! Benjamini–Yekutieli step-up).

mod maxt;
mod rates;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub use maxt::{maxt, maxt_both, maxt_step, MIN_DRAWS};
pub use rates::{augment_gfwer, augment_tppfp, fdr_by, reject_set, ErrorRate, ErrorRateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AdjustMethod {
    #[serde(rename = "bonferroni")]
    Bonferroni,
    #[serde(rename = "holm")]
    Holm,
    #[serde(rename = "sidak")]
    Sidak,
    #[serde(rename = "sidak-step")]
    SidakStep,
    #[serde(rename = "maxt")]
    MaxT,
    #[serde(rename = "maxt-step")]
    MaxTStep,
}

impl AdjustMethod {
    pub const ALL: [AdjustMethod; 6] = [
        AdjustMethod::Bonferroni,
        AdjustMethod::Holm,
        AdjustMethod::Sidak,
        AdjustMethod::SidakStep,
        AdjustMethod::MaxT,
        AdjustMethod::MaxTStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdjustMethod::Bonferroni => "bonferroni",
            AdjustMethod::Holm => "holm",
            AdjustMethod::Sidak => "sidak",
            AdjustMethod::SidakStep => "sidak-step",
            AdjustMethod::MaxT => "maxt",
            AdjustMethod::MaxTStep => "maxt-step",
        }
    }

    /// Whether the method needs the joint null distribution of the
    /// statistics.
    pub fn is_joint(self) -> bool {
        matches!(self, AdjustMethod::MaxT | AdjustMethod::MaxTStep)
    }
}

impl fmt::Display for AdjustMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdjustMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AdjustMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown adjustment method {s:?}")))
    }
}

/// Monte-Carlo settings of a max-T adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonteCarlo {
    pub draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedPValues {
    pub values: Vec<f64>,
    pub method: AdjustMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarlo>,
}

pub(crate) fn validate_pvalues(p: &[f64]) -> Result<()> {
    match p.iter().position(|x| !(0.0..=1.0).contains(x)) {
        Some(index) => Err(Error::InvalidPValue { index, value: p[index] }),
        None => Ok(()),
    }
}

/// Indices sorting `p` ascending, ties by index.
pub(crate) fn ascending_order(p: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    order
}

fn marginal(p: &[f64], method: AdjustMethod, f: impl Fn(f64, usize) -> f64) -> Result<AdjustedPValues> {
    validate_pvalues(p)?;
    let m = p.len();
    Ok(AdjustedPValues { values: p.iter().map(|&x| f(x, m)).collect(), method, monte_carlo: None })
}

/// Step-down adjustment: the `a`-th smallest p-value gets
/// `max_{b <= a} f(π_(b), m - b + 1)`.
fn step_down(p: &[f64], method: AdjustMethod, f: impl Fn(f64, usize) -> f64) -> Result<AdjustedPValues> {
    validate_pvalues(p)?;
    let m = p.len();
    let mut values = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (b, &idx) in ascending_order(p).iter().enumerate() {
        running = running.max(f(p[idx], m - b));
        values[idx] = running;
    }
    Ok(AdjustedPValues { values, method, monte_carlo: None })
}

fn sidak_factor(x: f64, m: usize) -> f64 {
    // 1 - (1 - x)^m without cancellation for small x; the clamp keeps
    // rounding inside the exact bounds x <= value <= m x
    (-(m as f64 * (-x).ln_1p()).exp_m1()).clamp(x, (m as f64 * x).min(1.0))
}

/// `min(m π, 1)`.
pub fn bonferroni(p: &[f64]) -> Result<AdjustedPValues> {
    marginal(p, AdjustMethod::Bonferroni, |x, m| (m as f64 * x).min(1.0))
}

/// Holm's step-down Bonferroni.
pub fn holm(p: &[f64]) -> Result<AdjustedPValues> {
    step_down(p, AdjustMethod::Holm, |x, k| (k as f64 * x).min(1.0))
}

/// `1 - (1 - π)^m`.
pub fn sidak(p: &[f64]) -> Result<AdjustedPValues> {
    marginal(p, AdjustMethod::Sidak, sidak_factor)
}

/// Step-down Šidák.
pub fn sidak_step(p: &[f64]) -> Result<AdjustedPValues> {
    step_down(p, AdjustMethod::SidakStep, sidak_factor)
}
