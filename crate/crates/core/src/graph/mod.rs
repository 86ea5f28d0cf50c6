//! Graph representations and the separation machinery behind the global
//! Markov properties.

mod edgelist;
mod order;
mod separation;
mod separator;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use order::{is_acyclic, is_well_numbering, topological_extension, VertexOrder};
pub use separation::{
    ancestors, d_separates, d_separates_moral, moral_ancestral_graph, moralize,
    separates_bidirected, separates_undirected,
};
pub use separator::{min_d_separator, min_vertex_separator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Undirected,
    Bidirected,
    Directed,
}

impl EdgeKind {
    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Undirected => "undirected",
            EdgeKind::Bidirected => "bidirected",
            EdgeKind::Directed => "directed",
        }
    }

    /// Edge token used by the edge-list format.
    pub fn token(self) -> &'static str {
        match self {
            EdgeKind::Undirected => "--",
            EdgeKind::Bidirected => "<->",
            EdgeKind::Directed => "->",
        }
    }

    fn is_symmetric(self) -> bool {
        !matches!(self, EdgeKind::Directed)
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sorted, duplicate-free set of vertex indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub(crate) fn check_range(&self, p: usize) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= p => Err(Error::VertexOutOfRange { vertex: v, p }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl From<&[usize]> for VertexSet {
    fn from(v: &[usize]) -> Self {
        VertexSet::new(v.iter().copied())
    }
}

impl<const N: usize> From<[usize; N]> for VertexSet {
    fn from(v: [usize; N]) -> Self {
        VertexSet::new(v)
    }
}

/// A graph on vertices `0..p` with a single edge kind.
///
/// Undirected and bidirected graphs store a symmetric adjacency matrix;
/// directed graphs store `i -> j` at `(i, j)` only. Directed graphs may be
/// built with cycles; operations that need acyclicity check for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    p: usize,
    kind: EdgeKind,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(p: usize, kind: EdgeKind) -> Self {
        Graph { p, kind, adj: vec![false; p * p] }
    }

    /// Complete undirected or bidirected graph.
    pub fn complete(p: usize, kind: EdgeKind) -> Result<Self> {
        if !kind.is_symmetric() {
            return Err(Error::InvalidParameter(
                "a complete directed graph needs an ordering; use Graph::complete_dag".into(),
            ));
        }
        let mut g = Graph::empty(p, kind);
        for i in 0..p {
            for j in i + 1..p {
                g.set(i, j, true);
            }
        }
        Ok(g)
    }

    /// Complete DAG in which every edge points from lower to higher rank.
    pub fn complete_dag(order: &VertexOrder) -> Self {
        let p = order.len();
        let mut g = Graph::empty(p, EdgeKind::Directed);
        let verts = order.vertices();
        for a in 0..p {
            for b in a + 1..p {
                g.set(verts[a], verts[b], true);
            }
        }
        g
    }

    pub fn from_edges(
        p: usize,
        kind: EdgeKind,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = Graph::empty(p, kind);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kind(&self) -> EdgeKind {
        self.kind
    }

    fn set(&mut self, i: usize, j: usize, value: bool) {
        self.adj[i * self.p + j] = value;
        if self.kind.is_symmetric() {
            self.adj[j * self.p + i] = value;
        }
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.p {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, p: self.p })
        }
    }

    pub(crate) fn expect_kind(&self, kind: EdgeKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongGraphKind { expected: kind.name(), found: self.kind.name() })
        }
    }

    /// Adds `i -> j` (directed) or `i - j`. Rejects self-loops and duplicate
    /// edges. A directed `j -> i` next to `i -> j` is accepted so that cyclic
    /// inputs can be represented and diagnosed.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if self.has_edge(i, j) {
            return Err(Error::EdgePresent(i, j));
        }
        self.set(i, j, true);
        Ok(())
    }

    /// Removes the edge between `i` and `j` in whichever direction it has.
    pub fn remove_edge(&mut self, i: usize, j: usize) {
        if i < self.p && j < self.p {
            self.adj[i * self.p + j] = false;
            self.adj[j * self.p + i] = false;
        }
    }

    /// `i -> j` for directed graphs, `i - j` otherwise.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.p && j < self.p && self.adj[i * self.p + j]
    }

    /// Whether `i` and `j` are joined by an edge of any orientation.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.has_edge(i, j) || self.has_edge(j, i)
    }

    /// Edges as `(i, j)` pairs: `i < j` for symmetric kinds, `(from, to)`
    /// for directed graphs. Sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.p {
            for j in 0..self.p {
                if self.adj[i * self.p + j] && (!self.kind.is_symmetric() || i < j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        let total = self.adj.iter().filter(|&&b| b).count();
        if self.kind.is_symmetric() {
            total / 2
        } else {
            total
        }
    }

    /// Neighbours in the skeleton.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&u| self.adjacent(v, u))
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&u| self.has_edge(v, u))
    }

    fn parent_iter(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&u| self.has_edge(u, v))
    }

    /// Parents of `j` in a directed graph.
    pub fn parents(&self, j: usize) -> Result<VertexSet> {
        self.expect_kind(EdgeKind::Directed)?;
        self.check_vertex(j)?;
        Ok(self.parent_iter(j).collect())
    }

    /// Whether every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.p == other.p
            && self.kind == other.kind
            && self.edges().into_iter().all(|(i, j)| other.has_edge(i, j))
    }

    /// Induced subgraph on `keep`; other vertices remain but lose all edges.
    pub fn restricted_to(&self, keep: &[bool]) -> Graph {
        let mut g = self.clone();
        for i in 0..self.p {
            for j in 0..self.p {
                if !(keep[i] && keep[j]) {
                    g.adj[i * self.p + j] = false;
                }
            }
        }
        g
    }
}

pub(crate) fn check_disjoint(sets: [&VertexSet; 3]) -> Result<()> {
    let [a, b, c] = sets;
    if a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c) {
        Ok(())
    } else {
        Err(Error::OverlappingSets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_set_sorts_and_dedups() {
        let s = VertexSet::new([4, 1, 4, 2]);
        assert_eq!(s.as_slice(), &[1, 2, 4]);
        assert!(s.contains(2));
        assert!(!s.contains(3));
    }

    #[test]
    fn symmetric_edges_are_stored_both_ways() {
        let g = Graph::from_edges(3, EdgeKind::Undirected, [(2, 0)]).unwrap();
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert_eq!(g.edges(), vec![(0, 2)]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        let mut g = Graph::empty(3, EdgeKind::Directed);
        assert!(matches!(g.add_edge(1, 1), Err(Error::SelfLoop(1))));
        g.add_edge(0, 1).unwrap();
        assert!(matches!(g.add_edge(0, 1), Err(Error::EdgePresent(0, 1))));
        assert!(matches!(g.add_edge(0, 7), Err(Error::VertexOutOfRange { vertex: 7, p: 3 })));
    }

    #[test]
    fn parents_of_collider_sink() {
        // 1->2, 2->4, 3->4 in 0-based labels
        let g = Graph::from_edges(4, EdgeKind::Directed, [(0, 1), (1, 3), (2, 3)]).unwrap();
        assert_eq!(g.parents(3).unwrap(), VertexSet::from([1, 2]));
        assert!(g.parents(0).unwrap().is_empty());
        assert!(g.parents(9).is_err());
    }

    #[test]
    fn parents_of_diamond_sink_without_tested_edge() {
        // upper DAG: 1->2, 2->3, 2->4, 3->5, 4->5, 1->5
        let mut g = Graph::from_edges(
            5,
            EdgeKind::Directed,
            [(0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (0, 4)],
        )
        .unwrap();
        g.remove_edge(0, 4);
        assert_eq!(g.parents(4).unwrap(), VertexSet::from([2, 3]));
    }
}
