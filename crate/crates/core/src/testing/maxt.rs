//! Single-step and step-down max-T adjustments with a Monte-Carlo
//! approximation of the joint null distribution `N(0, R)`.
//!
//! Draw `d` uses its own ChaCha stream of the master seed, and draws are
//! reduced through integer exceedance counts, so results do not depend on
//! how rayon schedules the work.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{AdjustMethod, AdjustedPValues, MonteCarlo};
use crate::error::{Error, Result};
use crate::linalg;
use crate::stats::normal_two_sided;

/// Fewest Monte-Carlo draws accepted.
pub const MIN_DRAWS: usize = 1000;

/// Eigenvalue floor applied to the null correlation before factoring.
const EIGEN_FLOOR: f64 = 1e-10;

fn validate(stats: &[f64], null_corr: &DMatrix<f64>, mc: &MonteCarlo) -> Result<()> {
    if mc.draws < MIN_DRAWS {
        return Err(Error::TooFewDraws { got: mc.draws, min: MIN_DRAWS });
    }
    if let Some(k) = stats.iter().position(|t| t.is_nan()) {
        return Err(Error::NonFinite(format!("test statistic {k}")));
    }
    let m = stats.len();
    if null_corr.nrows() != m || null_corr.ncols() != m {
        return Err(Error::InvalidParameter(format!(
            "null correlation is {}x{} but there are {m} statistics",
            null_corr.nrows(),
            null_corr.ncols()
        )));
    }
    Ok(())
}

/// Exceedance counts over all draws: `single[a]` counts draws whose overall
/// maximum reaches `|T_a|`; `step[b]` counts draws whose maximum over the
/// statistics ranked `b..` (by decreasing `|T|`) reaches the `b`-th largest.
struct Counts {
    single: Vec<u64>,
    step: Vec<u64>,
}

impl Counts {
    fn zeros(m: usize) -> Self {
        Counts { single: vec![0; m], step: vec![0; m] }
    }

    fn merge(mut self, other: Counts) -> Self {
        for (a, b) in self.single.iter_mut().zip(other.single) {
            *a += b;
        }
        for (a, b) in self.step.iter_mut().zip(other.step) {
            *a += b;
        }
        self
    }
}

fn count_exceedances(abs_t: &[f64], order: &[usize], factor: &DMatrix<f64>, mc: &MonteCarlo) -> Counts {
    let m = abs_t.len();
    (0..mc.draws)
        .into_par_iter()
        .fold(
            || (Counts::zeros(m), vec![0.0; m]),
            |(mut counts, mut suffix), d| {
                let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
                rng.set_stream(d as u64);
                let g = DVector::from_iterator(m, (0..m).map(|_| StandardNormal.sample(&mut rng)));
                let z = factor * g;
                let mut running = 0.0f64;
                for b in (0..m).rev() {
                    running = running.max(z[order[b]].abs());
                    suffix[b] = running;
                }
                let overall = suffix[0];
                for a in 0..m {
                    if overall >= abs_t[a] {
                        counts.single[a] += 1;
                    }
                    if suffix[a] >= abs_t[order[a]] {
                        counts.step[a] += 1;
                    }
                }
                (counts, suffix)
            },
        )
        .map(|(counts, _)| counts)
        .reduce(|| Counts::zeros(m), Counts::merge)
}

/// Single-step and step-down max-T adjusted p-values from one shared set of
/// draws. Estimates are floored at the unadjusted normal p-value.
pub fn maxt_both(
    stats: &[f64],
    null_corr: &DMatrix<f64>,
    mc: MonteCarlo,
) -> Result<(AdjustedPValues, AdjustedPValues)> {
    validate(stats, null_corr, &mc)?;
    let m = stats.len();
    let abs_t: Vec<f64> = stats.iter().map(|t| t.abs()).collect();
    let raw: Vec<f64> = stats.iter().map(|&t| normal_two_sided(t)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| abs_t[b].total_cmp(&abs_t[a]).then(a.cmp(&b)));

    let counts = if m == 0 {
        Counts::zeros(0)
    } else {
        let factor = linalg::psd_factor(null_corr, EIGEN_FLOOR)?;
        count_exceedances(&abs_t, &order, &factor, &mc)
    };
    let b = mc.draws as f64;

    let single: Vec<f64> =
        (0..m).map(|a| (counts.single[a] as f64 / b).max(raw[a]).min(1.0)).collect();
    let mut step = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (rank, &a) in order.iter().enumerate() {
        running = running.max((counts.step[rank] as f64 / b).max(raw[a]).min(1.0));
        step[a] = running;
    }
    let wrap = |values, method| AdjustedPValues { values, method, monte_carlo: Some(mc) };
    Ok((wrap(single, AdjustMethod::MaxT), wrap(step, AdjustMethod::MaxTStep)))
}

/// Single-step max-T adjustment.
pub fn maxt(stats: &[f64], null_corr: &DMatrix<f64>, mc: MonteCarlo) -> Result<AdjustedPValues> {
    maxt_both(stats, null_corr, mc).map(|(single, _)| single)
}

/// Step-down max-T adjustment.
pub fn maxt_step(stats: &[f64], null_corr: &DMatrix<f64>, mc: MonteCarlo) -> Result<AdjustedPValues> {
    maxt_both(stats, null_corr, mc).map(|(_, step)| step)
}
