//! Multivariate normal sampling, random ground-truth models, and the
//! Monte-Carlo harness that measures error rates of the selection pipeline.

mod harness;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexOrder};
use crate::linalg;
use crate::selection::GraphClass;

pub use harness::{estimate_error_rates, ErrorRateRow, ErrorRateTable, HarnessConfig};

/// Draws from `N(0, Σ)` through a fixed factor `L` with `L Lᵗ = Σ`.
#[derive(Debug, Clone)]
pub struct MvnSampler {
    factor: DMatrix<f64>,
}

impl MvnSampler {
    /// Fails unless `cov` is symmetric and positive semidefinite up to
    /// rounding; tiny negative eigenvalues are clipped to zero.
    pub fn new(cov: &DMatrix<f64>) -> Result<Self> {
        Ok(MvnSampler { factor: linalg::psd_factor(cov, 0.0)? })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    /// `count × p` matrix of draws. Row `r` depends only on `(seed, r)`.
    pub fn sample(&self, count: usize, seed: u64) -> DMatrix<f64> {
        let p = self.dim();
        let mut out = DMatrix::zeros(count, p);
        for r in 0..count {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let g = DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(&mut rng)));
            out.row_mut(r).copy_from(&(&self.factor * g).transpose());
        }
        out
    }
}

/// `count` draws from `N(0, cov)`, one per row.
pub fn sample_mvn(cov: &DMatrix<f64>, count: usize, seed: u64) -> Result<DMatrix<f64>> {
    Ok(MvnSampler::new(cov)?.sample(count, seed))
}

/// Parameters of a random ground-truth model.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub p: usize,
    pub class: GraphClass,
    /// Number of edges of the true graph.
    pub edges: usize,
    /// Range of the nonzero partial correlation magnitudes.
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl ModelSpec {
    /// Seven variables, nine undirected edges, partial correlations of
    /// magnitude in `[0.2, 0.55]`.
    pub fn seven_by_nine() -> Self {
        ModelSpec { p: 7, class: GraphClass::Undirected, edges: 9, lo: 0.2, hi: 0.55, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        self.class.check_p(self.p)?;
        let max = self.p * self.p.saturating_sub(1) / 2;
        if self.edges > max {
            return Err(Error::InvalidParameter(format!(
                "{} edges requested but only {max} pairs exist on {} vertices",
                self.edges, self.p
            )));
        }
        if !(self.lo > 0.0 && self.lo <= self.hi && self.hi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "partial correlation range [{}, {}] must satisfy 0 < lo <= hi < 1",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// A covariance matrix together with the graph it is pairwise faithful to.
#[derive(Debug, Clone)]
pub struct GeneratedModel {
    /// Correlation matrix (unit diagonal).
    pub sigma: DMatrix<f64>,
    pub graph: Graph,
}

/// Attempts allowed before [`generate_model`] gives up.
pub const RETRY_BUDGET: usize = 10_000;

/// Random graph with the requested number of edges and a covariance
/// matrix faithful to it.
pub fn generate_model(spec: &ModelSpec) -> Result<GeneratedModel> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pairs: Vec<(usize, usize)> = crate::stats::pair_index(spec.p);
    pairs.shuffle(&mut rng);
    let mut graph = Graph::empty(spec.p, spec.class.edge_kind());
    for &(a, b) in &pairs[..spec.edges] {
        let (i, j) = spec.class.orient(a, b);
        graph.add_edge(i, j)?;
    }
    let sigma = sigma_for_graph(&graph, &spec.class, spec.lo, spec.hi, &mut rng)?;
    Ok(GeneratedModel { sigma, graph })
}

/// Correlation matrix whose partial correlations `ρ_{ij·C(i,j)}` vanish
/// exactly off the edges of `graph` and have magnitude in `[0.9 lo, hi]`
/// on them.
///
/// Undirected graphs get a unit-diagonal concentration matrix with entries
/// `-ρ`, bidirected graphs a unit-diagonal covariance with entries `ρ`;
/// both are shrunk by a common factor until positive definite and redrawn
/// when the shrinkage pushes a magnitude below `0.9 lo`. DAGs are built
/// recursively along the ordering with regression coefficients chosen to
/// hit the drawn partial correlations exactly.
pub fn sigma_for_graph(
    graph: &Graph,
    class: &GraphClass,
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    if graph.kind() != class.edge_kind() {
        return Err(Error::WrongGraphKind { expected: class.edge_kind().name(), found: graph.kind().name() });
    }
    class.check_p(graph.p())?;
    if !(lo > 0.0 && lo <= hi && hi < 1.0) {
        return Err(Error::InvalidParameter(format!("invalid partial correlation range [{lo}, {hi}]")));
    }
    let draw = |rng: &mut dyn rand::RngCore| {
        let magnitude = rng.random_range(lo..=hi);
        if rng.random_bool(0.5) { magnitude } else { -magnitude }
    };
    match class {
        GraphClass::Dag(order) => {
            let values: Vec<f64> = graph.edges().iter().map(|_| draw(rng)).collect();
            dag_sigma(graph, order, &values)
        }
        _ => {
            for _ in 0..RETRY_BUDGET {
                let mut m = DMatrix::identity(graph.p(), graph.p());
                for (i, j) in graph.edges() {
                    let rho = draw(rng);
                    let v = if matches!(class, GraphClass::Undirected) { -rho } else { rho };
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
                let Some(scaled) = shrink_to_pd(&m) else { continue };
                let min_mag = graph.edges().iter().map(|&(i, j)| scaled[(i, j)].abs()).fold(f64::INFINITY, f64::min);
                if graph.edge_count() > 0 && min_mag < 0.9 * lo {
                    continue;
                }
                let sigma = match class {
                    GraphClass::Undirected => linalg::spd_inverse(&scaled, "concentration matrix")?,
                    _ => scaled,
                };
                return Ok(to_correlation(&sigma));
            }
            Err(Error::RetryBudgetExhausted(RETRY_BUDGET))
        }
    }
}

/// Scales the off-diagonal part of a unit-diagonal matrix by powers of
/// 0.95 until its smallest eigenvalue is at least 0.05.
fn shrink_to_pd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = m.nrows();
    let mut s = 1.0;
    while s > 1e-3 {
        let scaled = DMatrix::from_fn(p, p, |a, b| if a == b { 1.0 } else { s * m[(a, b)] });
        if scaled.clone().symmetric_eigenvalues().min() >= 0.05 {
            return Some(scaled);
        }
        s *= 0.95;
    }
    None
}

fn to_correlation(m: &DMatrix<f64>) -> DMatrix<f64> {
    let d: Vec<f64> = (0..m.nrows()).map(|k| m[(k, k)].sqrt()).collect();
    let mut c = DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] / (d[a] * d[b]));
    for k in 0..c.nrows() {
        c[(k, k)] = 1.0;
    }
    c
}

/// Covariance of the recursive system `Y_j = Σ β_ij Y_i + ε_j` with unit
/// error variances. Since `ρ_{ij·P∖{i}} / √(1 - ρ²) = β_ij √(var(Y_i | P∖{i}))`
/// for the predecessors `P` of `j`, each `β_ij` can be solved for from the
/// target partial correlation given the covariance of `P`.
fn dag_sigma(graph: &Graph, order: &VertexOrder, values: &[f64]) -> Result<DMatrix<f64>> {
    let p = graph.p();
    let mut target = DMatrix::zeros(p, p);
    for (&(i, j), &v) in graph.edges().iter().zip(values) {
        target[(i, j)] = v;
    }
    let mut sigma = DMatrix::zeros(p, p);
    for (rank, &j) in order.vertices().iter().enumerate() {
        let preds = &order.vertices()[..rank];
        if preds.is_empty() {
            sigma[(j, j)] = 1.0;
            continue;
        }
        let sp = linalg::principal_submatrix(&sigma, preds);
        let sp_inv = linalg::spd_inverse(&sp, "predecessor covariance")?;
        let beta = DVector::from_iterator(
            preds.len(),
            preds.iter().enumerate().map(|(a, &i)| {
                let rho: f64 = target[(i, j)];
                // var(Y_i | other predecessors) = 1 / (Σ_P⁻¹)_ii
                rho / (1.0 - rho * rho).sqrt() * sp_inv[(a, a)].sqrt()
            }),
        );
        let cross = &sp * &beta;
        for (a, &i) in preds.iter().enumerate() {
            sigma[(i, j)] = cross[a];
            sigma[(j, i)] = cross[a];
        }
        sigma[(j, j)] = beta.dot(&cross) + 1.0;
    }
    Ok(to_correlation(&sigma))
}
