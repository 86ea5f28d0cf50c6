use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::{EdgeKind, Graph};
use crate::error::{Error, Result};

/// A total order of the vertices `0..p`, stored as the vertex at each rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VertexOrder {
    vertices: Vec<usize>,
    #[serde(skip)]
    rank: Vec<usize>,
}

impl VertexOrder {
    /// `vertices[r]` is the vertex at rank `r`.
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        let p = vertices.len();
        let mut rank = vec![usize::MAX; p];
        for (r, &v) in vertices.iter().enumerate() {
            if v >= p || rank[v] != usize::MAX {
                return Err(Error::InvalidOrdering(p));
            }
            rank[v] = r;
        }
        Ok(VertexOrder { vertices, rank })
    }

    pub fn identity(p: usize) -> Self {
        VertexOrder { vertices: (0..p).collect(), rank: (0..p).collect() }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// Vertices ranked strictly before `v`.
    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.vertices[..self.rank[v]]
    }
}

/// Kahn's algorithm; returns the order found, or `None` on a cycle.
fn kahn(g: &Graph) -> Option<Vec<usize>> {
    let p = g.p();
    let mut indegree: Vec<usize> = (0..p).map(|v| g.parent_iter(v).count()).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..p).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut out = Vec::with_capacity(p);
    while let Some(Reverse(v)) = ready.pop() {
        out.push(v);
        for c in g.children(v) {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    (out.len() == p).then_some(out)
}

pub fn is_acyclic(g: &Graph) -> Result<bool> {
    g.expect_kind(EdgeKind::Directed)?;
    Ok(kahn(g).is_some())
}

pub(crate) fn require_dag(g: &Graph) -> Result<()> {
    if is_acyclic(g)? {
        Ok(())
    } else {
        Err(Error::CyclicGraph)
    }
}

/// True iff every edge `i -> j` has `i` ranked before `j`.
pub fn is_well_numbering(g: &Graph, order: &VertexOrder) -> Result<bool> {
    require_dag(g)?;
    if order.len() != g.p() {
        return Err(Error::InvalidOrdering(g.p()));
    }
    Ok(g.edges().into_iter().all(|(i, j)| order.rank(i) < order.rank(j)))
}

/// A well-numbering of an acyclic graph, breaking ties by lowest label.
pub fn topological_extension(g: &Graph) -> Result<VertexOrder> {
    g.expect_kind(EdgeKind::Directed)?;
    let vertices = kahn(g).ok_or(Error::CyclicGraph)?;
    VertexOrder::new(vertices)
}
