//! The selection pipeline: hypotheses, test statistics, adjustment, and
//! the selected graph.

mod hypotheses;
mod report;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result, Stage};
use crate::graph::Graph;
use crate::stats::{
    self, asym_cov_closed, asym_cov_delta, effective_sample_size, fisher_z, normal_two_sided,
    partial_correlation, z_scale, z_statistic, CorrelationMode, CovarianceSummary, Dataset, PairTarget,
    Provenance,
};
use crate::testing::{self, AdjustMethod, AdjustedPValues, ErrorRateSpec, MonteCarlo};

pub use hypotheses::{build_hypotheses, reduce_conditioning, GraphClass, Hypothesis, PriorKnowledge, Reduction};

/// Everything [`run_selection`] needs besides the data.
#[derive(Debug, Clone)]
pub struct SelectionConfig {
    pub class: GraphClass,
    pub prior: PriorKnowledge,
    pub method: AdjustMethod,
    pub error: ErrorRateSpec,
    pub monte_carlo: MonteCarlo,
    pub reduction: Option<Reduction>,
}

impl SelectionConfig {
    /// No prior knowledge, no reduction, the class's default method, and
    /// 10,000 Monte-Carlo draws with seed 0.
    pub fn new(class: GraphClass, error: ErrorRateSpec) -> Self {
        SelectionConfig {
            method: class.default_method(),
            class,
            prior: PriorKnowledge::none(),
            error,
            monte_carlo: MonteCarlo { draws: 10_000, seed: 0 },
            reduction: None,
        }
    }
}

/// Per-hypothesis statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRecord {
    pub i: usize,
    pub j: usize,
    pub cond: Vec<usize>,
    pub n_eff: usize,
    pub r: f64,
    pub z: f64,
    pub statistic: f64,
    pub p_value: f64,
}

/// Which p-values the rejection rule read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionBasis {
    Adjusted,
    Unadjusted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeRecord {
    #[serde(flatten)]
    pub test: TestRecord,
    pub adjusted: f64,
    pub selected: bool,
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub names: Vec<String>,
    pub class: GraphClass,
    pub graph: Graph,
    pub method: AdjustMethod,
    pub error: ErrorRateSpec,
    pub basis: DecisionBasis,
    pub monte_carlo: Option<MonteCarlo>,
    pub null_provenance: Option<Provenance>,
    pub reduction: Option<Reduction>,
    /// Edges known to be present, as `(i, j)` oriented like the graph.
    pub prior_present: Vec<(usize, usize)>,
    pub edges: Vec<EdgeRecord>,
}

impl SelectionResult {
    pub fn alpha(&self) -> f64 {
        self.error.alpha
    }
}

/// Hypotheses with their statistics, ready to be adjusted by any method.
#[derive(Debug, Clone)]
pub struct PreparedTests {
    pub hypotheses: Vec<Hypothesis>,
    pub records: Vec<TestRecord>,
    cov: DMatrix<f64>,
}

impl PreparedTests {
    pub fn raw_pvalues(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_value).collect()
    }

    pub fn statistics(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.statistic).collect()
    }

    /// Asymptotic null correlation of the standardized statistics.
    ///
    /// Uses the closed form when every conditioning set is the full
    /// complement (undirected) or empty (bidirected), and the delta method
    /// otherwise.
    pub fn null_correlation(&self, class: &GraphClass) -> Result<(DMatrix<f64>, Provenance)> {
        let p = self.cov.nrows();
        let canonical = |h: &Hypothesis| h.cond == class.canonical_conditioning(p, h.i, h.j);
        let mode = match class {
            GraphClass::Undirected => Some(CorrelationMode::Saturated),
            GraphClass::Bidirected => Some(CorrelationMode::Marginal),
            GraphClass::Dag(_) => None,
        };
        let omega = match mode {
            Some(mode) if self.hypotheses.iter().all(canonical) => {
                let full = asym_cov_closed(&self.cov, mode)?;
                let index: Vec<usize> = self.hypotheses.iter().map(|h| pair_position(p, h.i, h.j)).collect();
                let matrix = DMatrix::from_fn(index.len(), index.len(), |a, b| full.matrix[(index[a], index[b])]);
                stats::AsymptoticCovariance { matrix, provenance: full.provenance }
            }
            _ => {
                let targets: Vec<PairTarget<'_>> =
                    self.hypotheses.iter().map(|h| PairTarget { i: h.i, j: h.j, cond: h.cond.as_slice() }).collect();
                asym_cov_delta(&self.cov, &targets)?
            }
        };
        let scaled = z_scale(&omega)?;
        Ok((scaled.matrix, scaled.provenance))
    }
}

/// Position of the unordered pair in [`stats::pair_index`].
fn pair_position(p: usize, a: usize, b: usize) -> usize {
    let (i, j) = (a.min(b), a.max(b));
    i * p - i * (i + 1) / 2 + (j - i - 1)
}

/// Builds (and optionally reduces) the hypotheses and computes their
/// statistics from a covariance summary.
pub fn prepare_tests(
    summary: &CovarianceSummary,
    class: &GraphClass,
    prior: &PriorKnowledge,
    reduction: Option<Reduction>,
) -> Result<PreparedTests> {
    let p = summary.p();
    let mut hyps = build_hypotheses(class, p, prior).map_err(Error::at(Stage::Hypotheses))?;
    if let Some(red) = reduction {
        hyps = reduce_conditioning(class, p, &hyps, prior, red).map_err(Error::at(Stage::Reduction))?;
    }
    let records = hyps
        .par_iter()
        .map(|h| test_record(summary, h))
        .collect::<Result<Vec<_>>>()
        .map_err(Error::at(Stage::Statistics))?;
    Ok(PreparedTests { hypotheses: hyps, records, cov: summary.cov.clone() })
}

fn test_record(summary: &CovarianceSummary, h: &Hypothesis) -> Result<TestRecord> {
    let n_eff = effective_sample_size(summary.n, h.cond.len())?;
    let r = partial_correlation(&summary.cov, h.i, h.j, h.cond.as_slice())?;
    let z = fisher_z(r)?;
    let statistic = z_statistic(z, n_eff)?;
    Ok(TestRecord {
        i: h.i,
        j: h.j,
        cond: h.cond.as_slice().to_vec(),
        n_eff,
        r,
        z,
        statistic,
        p_value: normal_two_sided(statistic),
    })
}

/// Adjusted p-values of `tests` for each of `methods`, in order. The two
/// max-T variants share one set of Monte-Carlo draws.
pub fn adjust_many(
    tests: &PreparedTests,
    class: &GraphClass,
    methods: &[AdjustMethod],
    mc: MonteCarlo,
) -> Result<(Vec<AdjustedPValues>, Option<Provenance>)> {
    let raw = tests.raw_pvalues();
    let mut joint = None;
    let mut provenance = None;
    if methods.iter().any(|m| m.is_joint()) && !raw.is_empty() {
        let (corr, prov) = tests.null_correlation(class)?;
        provenance = Some(prov);
        joint = Some(testing::maxt_both(&tests.statistics(), &corr, mc)?);
    }
    methods
        .iter()
        .map(|&m| match m {
            AdjustMethod::Bonferroni => testing::bonferroni(&raw),
            AdjustMethod::Holm => testing::holm(&raw),
            AdjustMethod::Sidak => testing::sidak(&raw),
            AdjustMethod::SidakStep => testing::sidak_step(&raw),
            AdjustMethod::MaxT | AdjustMethod::MaxTStep => match &joint {
                Some((single, step)) => Ok(if m == AdjustMethod::MaxT { single.clone() } else { step.clone() }),
                None => Ok(AdjustedPValues { values: Vec::new(), method: m, monte_carlo: Some(mc) }),
            },
        })
        .collect::<Result<Vec<_>>>()
        .map(|adj| (adj, provenance))
}

/// Assembles the selected graph from rejected hypotheses and the edges
/// known to be present.
pub fn assemble(
    names: &[String],
    class: &GraphClass,
    prior: &PriorKnowledge,
    tests: &PreparedTests,
    adjusted: &AdjustedPValues,
    provenance: Option<Provenance>,
    error: ErrorRateSpec,
    reduction: Option<Reduction>,
) -> Result<SelectionResult> {
    let p = names.len();
    let raw = tests.raw_pvalues();
    let rejected = error.decide(&raw, &adjusted.values).map_err(Error::at(Stage::Decision))?;
    let mut selected = vec![false; raw.len()];
    for &a in &rejected {
        selected[a] = true;
    }
    let mut graph = Graph::empty(p, class.edge_kind());
    let prior_present: Vec<(usize, usize)> = prior.present().map(|(a, b)| class.orient(a, b)).collect();
    let decided = tests.hypotheses.iter().zip(&selected).filter(|(_, &s)| s).map(|(h, _)| (h.i, h.j));
    for (i, j) in prior_present.iter().copied().chain(decided) {
        graph.add_edge(i, j).map_err(Error::at(Stage::Decision))?;
    }
    let edges = tests
        .records
        .iter()
        .zip(&adjusted.values)
        .zip(&selected)
        .map(|((t, &adj), &sel)| EdgeRecord { test: t.clone(), adjusted: adj, selected: sel })
        .collect();
    Ok(SelectionResult {
        names: names.to_vec(),
        class: class.clone(),
        graph,
        method: adjusted.method,
        error,
        basis: if error.rate.uses_adjusted() { DecisionBasis::Adjusted } else { DecisionBasis::Unadjusted },
        monte_carlo: adjusted.monte_carlo,
        null_provenance: if adjusted.method.is_joint() { provenance } else { None },
        reduction,
        prior_present,
        edges,
    })
}

/// Runs the pipeline on precomputed sufficient statistics, once per method.
pub fn select_many(
    names: &[String],
    summary: &CovarianceSummary,
    config: &SelectionConfig,
    methods: &[AdjustMethod],
) -> Result<Vec<SelectionResult>> {
    config.class.check_p(summary.p()).map_err(Error::at(Stage::Hypotheses))?;
    let tests = prepare_tests(summary, &config.class, &config.prior, config.reduction)?;
    let (adjusted, provenance) =
        adjust_many(&tests, &config.class, methods, config.monte_carlo).map_err(Error::at(Stage::Adjustment))?;
    adjusted
        .iter()
        .map(|adj| {
            assemble(names, &config.class, &config.prior, &tests, adj, provenance, config.error, config.reduction)
        })
        .collect()
}

/// Selects a graph from data.
pub fn run_selection(data: &Dataset, config: &SelectionConfig) -> Result<SelectionResult> {
    let summary = stats::summarize(data).map_err(Error::at(Stage::Summary))?;
    let mut results = select_many(data.names(), &summary, config, &[config.method])?;
    Ok(results.remove(0))
}

/// The graph whose missing edges are exactly the pairs with vanishing
/// population partial correlation `ρ_{ij·C(i,j)}`.
///
/// A partial correlation counts as zero when its magnitude is at most
/// `tol` times the largest magnitude among all pairs.
pub fn faithful_graph(sigma: &DMatrix<f64>, class: &GraphClass, tol: f64) -> Result<Graph> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    crate::linalg::check_symmetric(sigma)?;
    crate::linalg::cholesky(sigma, "covariance")?;
    let p = sigma.nrows();
    let hyps = build_hypotheses(class, p, &PriorKnowledge::none())?;
    let rho = hyps
        .iter()
        .map(|h| partial_correlation(sigma, h.i, h.j, h.cond.as_slice()))
        .collect::<Result<Vec<_>>>()?;
    let largest = rho.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let mut g = Graph::empty(p, class.edge_kind());
    for (h, r) in hyps.iter().zip(&rho) {
        if largest > 0.0 && r.abs() > tol * largest {
            g.add_edge(h.i, h.j)?;
        }
    }
    Ok(g)
}

/// Default relative tolerance of [`faithful_graph`].
pub const FAITHFUL_TOL: f64 = 1e-8;
