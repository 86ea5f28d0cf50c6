//! Minimum vertex separators by unit-capacity max-flow on the split graph
//! (Menger), with lexicographic tie-breaking by iterative forcing.

use std::collections::VecDeque;

use super::order::require_dag;
use super::separation::moral_ancestral_graph;
use super::{EdgeKind, Graph, VertexSet};
use crate::error::{Error, Result};

/// Max-flow between `s` and `t` where vertex `v` has capacity 1 if
/// `cuttable[v]` and is impassable if `removed[v]`. Returns `None` when
/// `s` and `t` are joined by a path of uncuttable vertices.
fn vertex_flow(g: &Graph, s: usize, t: usize, cuttable: &[bool], removed: &[bool]) -> Option<usize> {
    let p = g.p();
    let inf = p + 1;
    let n = 2 * p;
    // v_in = 2v, v_out = 2v + 1
    let mut cap = vec![0usize; n * n];
    for v in 0..p {
        if removed[v] {
            continue;
        }
        cap[(2 * v) * n + 2 * v + 1] = if cuttable[v] && v != s && v != t { 1 } else { inf };
        for u in g.neighbors(v) {
            if !removed[u] {
                cap[(2 * v + 1) * n + 2 * u] = inf;
            }
        }
    }
    let (src, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    let mut prev = vec![usize::MAX; n];
    loop {
        prev.fill(usize::MAX);
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            if x == sink {
                break;
            }
            for y in 0..n {
                if prev[y] == usize::MAX && cap[x * n + y] > 0 {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return Some(flow);
        }
        // every augmenting path crosses a unit arc unless the cut is infinite
        let mut bottleneck = usize::MAX;
        let mut y = sink;
        while y != src {
            let x = prev[y];
            bottleneck = bottleneck.min(cap[x * n + y]);
            y = x;
        }
        if bottleneck >= inf {
            return None;
        }
        let mut y = sink;
        while y != src {
            let x = prev[y];
            cap[x * n + y] -= bottleneck;
            cap[y * n + x] += bottleneck;
            y = x;
        }
        flow += bottleneck;
        if flow >= inf {
            return None;
        }
    }
}

/// Lexicographically smallest minimum set of `cuttable` vertices whose
/// removal disconnects `s` from `t` in the undirected graph `g`.
fn min_cut_lex(g: &Graph, s: usize, t: usize, cuttable: &[bool]) -> Option<VertexSet> {
    let p = g.p();
    let mut removed = vec![false; p];
    let size = vertex_flow(g, s, t, cuttable, &removed)?;
    let mut chosen = Vec::with_capacity(size);
    for v in (0..p).filter(|&v| cuttable[v] && v != s && v != t) {
        if chosen.len() == size {
            break;
        }
        removed[v] = true;
        match vertex_flow(g, s, t, cuttable, &removed) {
            Some(rest) if chosen.len() + 1 + rest == size => chosen.push(v),
            _ => removed[v] = false,
        }
    }
    debug_assert_eq!(chosen.len(), size);
    Some(VertexSet::new(chosen))
}

/// Minimum-cardinality set separating `i` and `j` in an undirected graph
/// that does not contain the edge `i - j`. Ties go to the lexicographically
/// smallest set; the result is empty when `i` and `j` are disconnected.
pub fn min_vertex_separator(g: &Graph, i: usize, j: usize) -> Result<VertexSet> {
    g.expect_kind(EdgeKind::Undirected)?;
    g.check_vertex(i)?;
    g.check_vertex(j)?;
    if i == j {
        return Err(Error::InvalidParameter("separator endpoints must differ".into()));
    }
    if g.has_edge(i, j) {
        return Err(Error::EdgePresent(i, j));
    }
    let cuttable = vec![true; g.p()];
    min_cut_lex(g, i, j, &cuttable).ok_or(Error::NoSeparator(i, j))
}

/// Minimum-cardinality d-separator of `i` and `j` drawn from `allowed`.
///
/// Any d-separator can be shrunk to one inside `An({i, j})`, and for sets
/// inside that closure d-separation coincides with vertex separation in
/// the moral graph of `An({i, j})`. The search is therefore a vertex cut in
/// that moral graph restricted to `allowed ∩ An({i, j})`.
pub fn min_d_separator(g: &Graph, i: usize, j: usize, allowed: &VertexSet) -> Result<VertexSet> {
    g.expect_kind(EdgeKind::Directed)?;
    require_dag(g)?;
    g.check_vertex(i)?;
    g.check_vertex(j)?;
    allowed.check_range(g.p())?;
    if i == j {
        return Err(Error::InvalidParameter("separator endpoints must differ".into()));
    }
    if allowed.contains(i) || allowed.contains(j) {
        return Err(Error::OverlappingSets);
    }
    if g.adjacent(i, j) {
        return Err(Error::EdgePresent(i, j));
    }
    let moral = moral_ancestral_graph(g, &VertexSet::from([i, j]))?;
    let cuttable: Vec<bool> = (0..g.p()).map(|v| allowed.contains(v)).collect();
    min_cut_lex(&moral, i, j, &cuttable).ok_or(Error::NoSeparator(i, j))
}
