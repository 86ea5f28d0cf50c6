use std::collections::VecDeque;

use super::order::require_dag;
use super::{check_disjoint, EdgeKind, Graph, VertexSet};
use crate::error::Result;

fn check_sets(g: &Graph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<()> {
    for s in [a, b, c] {
        s.check_range(g.p())?;
    }
    check_disjoint([a, b, c])
}

/// Whether `c` separates `a` from `b`: every path from `a` to `b` has a
/// nonendpoint vertex in `c`.
pub fn separates_undirected(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
) -> Result<bool> {
    g.expect_kind(EdgeKind::Undirected)?;
    check_sets(g, a, b, c)?;
    Ok(!reaches(g, a, b, |v| !c.contains(v)))
}

/// Bidirected (global) separation: no path from `a` to `b` has all of its
/// nonendpoint vertices inside `c`.
pub fn separates_bidirected(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
) -> Result<bool> {
    g.expect_kind(EdgeKind::Bidirected)?;
    check_sets(g, a, b, c)?;
    Ok(!reaches(g, a, b, |v| c.contains(v)))
}

/// Breadth-first search from `from` through vertices accepted by `pass`;
/// true if some vertex of `to` is adjacent to the explored region.
fn reaches(g: &Graph, from: &VertexSet, to: &VertexSet, pass: impl Fn(usize) -> bool) -> bool {
    let mut seen = vec![false; g.p()];
    let mut queue: VecDeque<usize> = from.iter().collect();
    for v in from.iter() {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for u in g.neighbors(v) {
            if to.contains(u) {
                return true;
            }
            if !seen[u] && pass(u) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    false
}

/// `set` together with all of its ancestors, as a membership mask.
pub fn ancestors(g: &Graph, set: &VertexSet) -> Result<Vec<bool>> {
    g.expect_kind(EdgeKind::Directed)?;
    set.check_range(g.p())?;
    let mut mark = vec![false; g.p()];
    let mut stack: Vec<usize> = set.iter().collect();
    while let Some(v) = stack.pop() {
        if !mark[v] {
            mark[v] = true;
            stack.extend(g.parent_iter(v).filter(|&u| !mark[u]));
        }
    }
    Ok(mark)
}

/// d-separation of `a` and `b` given `c`, by reachability over
/// (vertex, direction) states with collider bookkeeping.
pub fn d_separates(g: &Graph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    g.expect_kind(EdgeKind::Directed)?;
    require_dag(g)?;
    check_sets(g, a, b, c)?;

    // Colliders are open exactly when they are in An(c).
    let open_collider = ancestors(g, c)?;
    let p = g.p();
    // state index: 2v arriving from a child (moving up), 2v + 1 from a parent
    let mut seen = vec![false; 2 * p];
    let mut queue: VecDeque<(usize, bool)> = a.iter().map(|v| (v, true)).collect();
    while let Some((v, up)) = queue.pop_front() {
        let idx = 2 * v + usize::from(!up);
        if seen[idx] {
            continue;
        }
        seen[idx] = true;
        let blocked = c.contains(v);
        if !blocked && b.contains(v) {
            return Ok(false);
        }
        if up {
            if !blocked {
                queue.extend(g.parent_iter(v).map(|u| (u, true)));
                queue.extend(g.children(v).map(|u| (u, false)));
            }
        } else {
            if !blocked {
                queue.extend(g.children(v).map(|u| (u, false)));
            }
            if open_collider[v] {
                queue.extend(g.parent_iter(v).map(|u| (u, true)));
            }
        }
    }
    Ok(true)
}

/// Moral graph: drop directions and join every pair of parents that share
/// a child.
pub fn moralize(g: &Graph) -> Result<Graph> {
    g.expect_kind(EdgeKind::Directed)?;
    require_dag(g)?;
    let mut m = Graph::empty(g.p(), EdgeKind::Undirected);
    for (i, j) in g.edges() {
        m.set(i, j, true);
    }
    for v in 0..g.p() {
        let pa: Vec<usize> = g.parent_iter(v).collect();
        for (k, &x) in pa.iter().enumerate() {
            for &y in &pa[k + 1..] {
                m.set(x, y, true);
            }
        }
    }
    Ok(m)
}

/// Moral graph of the subgraph induced by the ancestral closure of `set`.
/// Vertices outside the closure are left isolated.
pub fn moral_ancestral_graph(g: &Graph, set: &VertexSet) -> Result<Graph> {
    let keep = ancestors(g, set)?;
    moralize(&g.restricted_to(&keep))
}

/// d-separation through the moralization criterion; an independent route
/// to the same relation as [`d_separates`].
pub fn d_separates_moral(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
) -> Result<bool> {
    g.expect_kind(EdgeKind::Directed)?;
    require_dag(g)?;
    check_sets(g, a, b, c)?;
    let all: VertexSet = a.iter().chain(b.iter()).chain(c.iter()).collect();
    let m = moral_ancestral_graph(g, &all)?;
    separates_undirected(&m, a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn vs<const N: usize>(v: [usize; N]) -> VertexSet {
        VertexSet::from(v)
    }

    // The three four-vertex graphs share the skeleton 1-2, 2-4, 3-4 (0-based below).
    fn four_vertex(kind: EdgeKind) -> Graph {
        Graph::from_edges(4, kind, [(0, 1), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn undirected_four_cycle_skeleton() {
        let g = four_vertex(EdgeKind::Undirected);
        assert!(separates_undirected(&g, &vs([0]), &vs([2, 3]), &vs([1])).unwrap());
        assert!(separates_undirected(&g, &vs([0]), &vs([2]), &vs([3])).unwrap());
        assert!(!separates_undirected(&g, &vs([0]), &vs([2]), &vs([])).unwrap());
    }

    #[test]
    fn bidirected_four_vertex() {
        let g = four_vertex(EdgeKind::Bidirected);
        assert!(separates_bidirected(&g, &vs([0]), &vs([2]), &vs([1])).unwrap());
        assert!(separates_bidirected(&g, &vs([0]), &vs([2]), &vs([])).unwrap());
        assert!(!separates_bidirected(&g, &vs([0]), &vs([2]), &vs([1, 3])).unwrap());
    }

    #[test]
    fn d_separation_four_vertex() {
        let g = four_vertex(EdgeKind::Directed);
        assert!(d_separates(&g, &vs([0, 1]), &vs([2]), &vs([])).unwrap());
        assert!(d_separates(&g, &vs([0]), &vs([2, 3]), &vs([1])).unwrap());
        assert!(!d_separates(&g, &vs([1]), &vs([2]), &vs([3])).unwrap());
        for (a, b, c) in [(vs([0, 1]), vs([2]), vs([])), (vs([1]), vs([2]), vs([3]))] {
            assert_eq!(
                d_separates(&g, &a, &b, &c).unwrap(),
                d_separates_moral(&g, &a, &b, &c).unwrap()
            );
        }
    }

    #[test]
    fn descendant_of_collider_opens_path() {
        // 0 -> 2 <- 1, 2 -> 3
        let g = Graph::from_edges(4, EdgeKind::Directed, [(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(d_separates(&g, &vs([0]), &vs([1]), &vs([])).unwrap());
        assert!(!d_separates(&g, &vs([0]), &vs([1]), &vs([3])).unwrap());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let g = four_vertex(EdgeKind::Undirected);
        assert!(matches!(
            separates_undirected(&g, &vs([0]), &vs([0, 2]), &vs([])),
            Err(Error::OverlappingSets)
        ));
        let d = four_vertex(EdgeKind::Directed);
        assert!(d_separates(&d, &vs([0]), &vs([2]), &vs([2])).is_err());
    }

    #[test]
    fn wrong_kind_rejected() {
        let g = four_vertex(EdgeKind::Bidirected);
        assert!(matches!(
            separates_undirected(&g, &vs([0]), &vs([2]), &vs([])),
            Err(Error::WrongGraphKind { .. })
        ));
    }

    #[test]
    fn cyclic_input_rejected() {
        let g = Graph::from_edges(3, EdgeKind::Directed, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(matches!(moralize(&g), Err(Error::CyclicGraph)));
        assert!(matches!(d_separates(&g, &vs([0]), &vs([2]), &vs([])), Err(Error::CyclicGraph)));
    }

    #[test]
    fn moralization() {
        let m = moralize(&four_vertex(EdgeKind::Directed)).unwrap();
        assert_eq!(m.edges(), vec![(0, 1), (1, 2), (1, 3), (2, 3)]);
        let chain = Graph::from_edges(3, EdgeKind::Directed, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(moralize(&chain).unwrap().edges(), vec![(0, 1), (1, 2)]);
        let edgeless = moralize(&Graph::empty(3, EdgeKind::Directed)).unwrap();
        assert_eq!(edgeless.edge_count(), 0);
        assert_eq!(edgeless.kind(), EdgeKind::Undirected);
    }
}
