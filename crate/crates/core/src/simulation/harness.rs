//! Empirical error rates of the selection pipeline on a known model.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{generate_model, GeneratedModel, ModelSpec, MvnSampler};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::selection::{select_many, SelectionConfig};
use crate::stats::{summarize, Dataset};
use crate::testing::{AdjustMethod, ErrorRate, ErrorRateSpec, MonteCarlo};

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub model: ModelSpec,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub methods: Vec<AdjustMethod>,
    pub error: ErrorRateSpec,
    /// Monte-Carlo draws per max-T adjustment.
    pub mc_draws: usize,
    pub seed: u64,
}

impl HarnessConfig {
    fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("at least one replicate is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no adjustment methods given".into()));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < self.model.p + 1) {
            return Err(Error::InvalidParameter(format!(
                "sample size {n} is below p + 1 = {}",
                self.model.p + 1
            )));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidParameter("no sample sizes given".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRateRow {
    pub method: AdjustMethod,
    pub n: usize,
    /// Event frequency, or the mean false-edge fraction for FDR.
    pub rate: f64,
    pub stderr: f64,
    /// Replicates that completed.
    pub replicates: usize,
    /// Replicates on which the pipeline failed; excluded from `rate`.
    pub failures: usize,
    /// Fraction of completed replicates recovering the true graph exactly.
    pub exact_recovery: f64,
}

#[derive(Debug, Clone)]
pub struct ErrorRateTable {
    pub error: ErrorRateSpec,
    pub truth: GeneratedModel,
    pub rows: Vec<ErrorRateRow>,
}

impl ErrorRateTable {
    pub fn row(&self, method: AdjustMethod, n: usize) -> Option<&ErrorRateRow> {
        self.rows.iter().find(|r| r.method == method && r.n == n)
    }

    /// CSV with columns `method,n,rate,stderr,R`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["method", "n", "rate", "stderr", "R"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.method.name().to_string(),
                r.n.to_string(),
                format!("{:.6}", r.rate),
                format!("{:.6}", r.stderr),
                r.replicates.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of one method on one replicate.
#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    event: f64,
    exact: bool,
}

fn score(selected: &Graph, truth: &Graph, rate: ErrorRate) -> Outcome {
    let edges = selected.edges();
    let false_edges = edges.iter().filter(|&&(i, j)| !truth.has_edge(i, j)).count();
    let fraction = if edges.is_empty() { 0.0 } else { false_edges as f64 / edges.len() as f64 };
    let event = match rate {
        ErrorRate::Fwer => (false_edges >= 1) as u8 as f64,
        ErrorRate::Gfwer { k } => (false_edges > k) as u8 as f64,
        ErrorRate::Tppfp { lambda } => (fraction > lambda) as u8 as f64,
        ErrorRate::Fdr => fraction,
    };
    Outcome { event, exact: selected == truth }
}

/// Seed of replicate `r` at the `size_index`-th sample size, drawn from
/// its own stream of the master seed.
fn replicate_seed(master: u64, size_index: usize, replicates: usize, r: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((size_index * replicates + r) as u64);
    rng.next_u64()
}

/// Runs every method on `replicates` datasets per sample size and tallies
/// the chosen error rate against the generated model's true graph.
pub fn estimate_error_rates(cfg: &HarnessConfig) -> Result<ErrorRateTable> {
    cfg.validate()?;
    let truth = generate_model(&cfg.model)?;
    let sampler = MvnSampler::new(&truth.sigma)?;
    let names: Vec<String> = (1..=cfg.model.p).map(|k| format!("x{k}")).collect();
    let mut rows = Vec::new();
    for (size_index, &n) in cfg.sample_sizes.iter().enumerate() {
        let outcomes: Vec<Option<Vec<Outcome>>> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let seed = replicate_seed(cfg.seed, size_index, cfg.replicates, r);
                let data = Dataset::new(names.clone(), sampler.sample(n, seed)).ok()?;
                let summary = summarize(&data).ok()?;
                let mut config = SelectionConfig::new(cfg.model.class.clone(), cfg.error);
                config.monte_carlo = MonteCarlo { draws: cfg.mc_draws, seed };
                let results = select_many(&names, &summary, &config, &cfg.methods).ok()?;
                Some(results.iter().map(|res| score(&res.graph, &truth.graph, cfg.error.rate)).collect())
            })
            .collect();
        let completed: Vec<&Vec<Outcome>> = outcomes.iter().flatten().collect();
        let failures = cfg.replicates - completed.len();
        let count = completed.len() as f64;
        for (k, &method) in cfg.methods.iter().enumerate() {
            let events: Vec<f64> = completed.iter().map(|o| o[k].event).collect();
            let exact = completed.iter().filter(|o| o[k].exact).count() as f64;
            let rate = if count > 0.0 { events.iter().sum::<f64>() / count } else { f64::NAN };
            let stderr = match cfg.error.rate {
                ErrorRate::Fdr if count > 1.0 => {
                    let var = events.iter().map(|e| (e - rate).powi(2)).sum::<f64>() / (count - 1.0);
                    (var / count).sqrt()
                }
                ErrorRate::Fdr => f64::NAN,
                _ => (rate * (1.0 - rate) / count).sqrt(),
            };
            rows.push(ErrorRateRow {
                method,
                n,
                rate,
                stderr,
                replicates: completed.len(),
                failures,
                exact_recovery: if count > 0.0 { exact / count } else { f64::NAN },
            });
        }
    }
    Ok(ErrorRateTable { error: cfg.error, truth, rows })
}
