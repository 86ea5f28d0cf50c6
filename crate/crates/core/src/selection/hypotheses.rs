//! Graph classes, prior edge knowledge and the per-pair hypotheses.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{min_d_separator, min_vertex_separator, EdgeKind, Graph, VertexOrder, VertexSet};
use crate::testing::AdjustMethod;

/// The model class selected from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphClass {
    Undirected,
    Bidirected,
    /// DAGs for which the given ordering is a well-numbering.
    Dag(VertexOrder),
}

impl GraphClass {
    pub fn name(&self) -> &'static str {
        match self {
            GraphClass::Undirected => "undirected",
            GraphClass::Bidirected => "bidirected",
            GraphClass::Dag(_) => "dag",
        }
    }

    pub fn edge_kind(&self) -> EdgeKind {
        match self {
            GraphClass::Undirected => EdgeKind::Undirected,
            GraphClass::Bidirected => EdgeKind::Bidirected,
            GraphClass::Dag(_) => EdgeKind::Directed,
        }
    }

    /// Sidak step-down for DAGs, whose joint null has no closed form, and
    /// step-down max-T otherwise.
    pub fn default_method(&self) -> AdjustMethod {
        match self {
            GraphClass::Dag(_) => AdjustMethod::SidakStep,
            _ => AdjustMethod::MaxTStep,
        }
    }

    pub(crate) fn check_p(&self, p: usize) -> Result<()> {
        match self {
            GraphClass::Dag(order) if order.len() != p => Err(Error::InvalidParameter(format!(
                "ordering covers {} vertices but there are {p} variables",
                order.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Orients the pair `{a, b}` as a hypothesis `(i, j)`: `i < j` for the
    /// symmetric classes, `i` ranked before `j` for DAGs.
    pub(crate) fn orient(&self, a: usize, b: usize) -> (usize, usize) {
        match self {
            GraphClass::Dag(order) if order.rank(a) > order.rank(b) => (b, a),
            GraphClass::Dag(_) => (a, b),
            _ => (a.min(b), a.max(b)),
        }
    }

    /// Conditioning set of the pairwise Markov property: all other
    /// vertices, nothing, or the predecessors of `j` other than `i`.
    pub fn canonical_conditioning(&self, p: usize, i: usize, j: usize) -> VertexSet {
        match self {
            GraphClass::Undirected => (0..p).filter(|&v| v != i && v != j).collect(),
            GraphClass::Bidirected => VertexSet::empty(),
            GraphClass::Dag(order) => {
                let (i, j) = self.orient(i, j);
                order.predecessors(j).iter().copied().filter(|&v| v != i).collect()
            }
        }
    }

    /// Complete graph of the class on `p` vertices.
    pub fn complete_graph(&self, p: usize) -> Result<Graph> {
        self.check_p(p)?;
        match self {
            GraphClass::Dag(order) => Ok(Graph::complete_dag(order)),
            _ => Graph::complete(p, self.edge_kind()),
        }
    }
}

/// Edges known to be absent (`E0`) or present (`E1`), as unordered pairs.
/// All other pairs are uncertain and get tested.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriorKnowledge {
    absent: BTreeSet<(usize, usize)>,
    present: BTreeSet<(usize, usize)>,
}

impl PriorKnowledge {
    pub fn none() -> Self {
        Self::default()
    }

    /// Builds the prior from graphs of the class's edge kind, checking that
    /// DAG edges point forward in the ordering and that no pair is both
    /// absent and present.
    pub fn from_graphs(class: &GraphClass, p: usize, absent: Option<&Graph>, present: Option<&Graph>) -> Result<Self> {
        class.check_p(p)?;
        let collect = |g: Option<&Graph>, what: &str| -> Result<BTreeSet<(usize, usize)>> {
            let Some(g) = g else { return Ok(BTreeSet::new()) };
            if g.p() != p {
                return Err(Error::InconsistentPrior(format!("{what} edges are on {} vertices, data has {p}", g.p())));
            }
            if g.kind() != class.edge_kind() {
                return Err(Error::InconsistentPrior(format!(
                    "{what} edges are {} but the graph class is {}",
                    g.kind(),
                    class.name()
                )));
            }
            let mut out = BTreeSet::new();
            for (a, b) in g.edges() {
                if let GraphClass::Dag(order) = class {
                    if order.rank(a) > order.rank(b) {
                        return Err(Error::InconsistentPrior(format!(
                            "{what} edge {} -> {} points backwards in the ordering",
                            a + 1,
                            b + 1
                        )));
                    }
                }
                if !out.insert((a.min(b), a.max(b))) {
                    return Err(Error::InconsistentPrior(format!("{what} edges join {} and {} twice", a + 1, b + 1)));
                }
            }
            Ok(out)
        };
        let absent = collect(absent, "absent")?;
        let present = collect(present, "present")?;
        if let Some(&(a, b)) = absent.intersection(&present).next() {
            return Err(Error::InconsistentPrior(format!("edge {}-{} is declared both absent and present", a + 1, b + 1)));
        }
        Ok(PriorKnowledge { absent, present })
    }

    pub fn is_absent(&self, i: usize, j: usize) -> bool {
        self.absent.contains(&(i.min(j), i.max(j)))
    }

    pub fn is_present(&self, i: usize, j: usize) -> bool {
        self.present.contains(&(i.min(j), i.max(j)))
    }

    pub fn present(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.present.iter().copied()
    }

    fn check_range(&self, p: usize) -> Result<()> {
        match self.absent.iter().chain(&self.present).find(|&&(_, b)| b >= p) {
            Some(&(_, b)) => Err(Error::VertexOutOfRange { vertex: b, p }),
            None => Ok(()),
        }
    }

    /// The upper graph: every edge of the class that is not known absent.
    pub fn upper_graph(&self, class: &GraphClass, p: usize) -> Result<Graph> {
        self.check_range(p)?;
        let mut g = class.complete_graph(p)?;
        for &(a, b) in &self.absent {
            g.remove_edge(a, b);
        }
        Ok(g)
    }
}

/// One test: `ρ_{ij·cond} = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub i: usize,
    pub j: usize,
    pub cond: VertexSet,
}

/// Which smaller conditioning sets to use when prior knowledge allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Smallest separating set in the upper graph (ties to the
    /// lexicographically first).
    Minimal,
    /// Parents of `j` in the upper DAG; same as `Minimal` for the symmetric
    /// classes.
    Parents,
}

/// One hypothesis per uncertain pair, in lexicographic pair order, with the
/// conditioning sets of the pairwise Markov property.
pub fn build_hypotheses(class: &GraphClass, p: usize, prior: &PriorKnowledge) -> Result<Vec<Hypothesis>> {
    class.check_p(p)?;
    prior.check_range(p)?;
    let mut out = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if prior.is_absent(a, b) || prior.is_present(a, b) {
                continue;
            }
            let (i, j) = class.orient(a, b);
            out.push(Hypothesis { i, j, cond: class.canonical_conditioning(p, i, j) });
        }
    }
    Ok(out)
}

/// Replaces each conditioning set by one that separates `i` and `j` in the
/// upper graph with the tested edge removed. For bidirected graphs the
/// sets are already empty and nothing changes.
pub fn reduce_conditioning(
    class: &GraphClass,
    p: usize,
    hypotheses: &[Hypothesis],
    prior: &PriorKnowledge,
    reduction: Reduction,
) -> Result<Vec<Hypothesis>> {
    if matches!(class, GraphClass::Bidirected) {
        return Ok(hypotheses.to_vec());
    }
    let upper = prior.upper_graph(class, p)?;
    hypotheses
        .iter()
        .map(|h| {
            let mut g = upper.clone();
            g.remove_edge(h.i, h.j);
            let cond = match (class, reduction) {
                (GraphClass::Undirected, _) => min_vertex_separator(&g, h.i, h.j)?,
                (GraphClass::Dag(_), Reduction::Parents) => {
                    g.parents(h.j)?.iter().filter(|&v| v != h.i).collect()
                }
                (GraphClass::Dag(_), Reduction::Minimal) => {
                    let allowed = class.canonical_conditioning(p, h.i, h.j);
                    min_d_separator(&g, h.i, h.j, &allowed)?
                }
                (GraphClass::Bidirected, _) => unreachable!(),
            };
            Ok(Hypothesis { i: h.i, j: h.j, cond })
        })
        .collect()
}
