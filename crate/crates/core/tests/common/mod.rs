//! Brute-force reference implementations used to check the library.
//! Everything here is deliberately naive: path and subset enumeration,
//! recursive partial correlations.

#![allow(dead_code)]

use ggm_select::graph::{EdgeKind, Graph, VertexOrder};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All simple paths from `a` to `b` in the skeleton of `g`.
pub fn simple_paths(g: &Graph, a: usize, b: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, path: &mut Vec<usize>, b: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == b {
            out.push(path.clone());
            return;
        }
        for v in 0..g.p() {
            if (g.has_edge(last, v) || g.has_edge(v, last)) && !path.contains(&v) {
                path.push(v);
                walk(g, path, b, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, &mut vec![a], b, &mut out);
    out
}

fn interior(path: &[usize]) -> &[usize] {
    &path[1..path.len() - 1]
}

/// No path between A and B avoids C.
pub fn separated_undirected(g: &Graph, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    a.iter().all(|&x| {
        b.iter().all(|&y| simple_paths(g, x, y).iter().all(|p| interior(p).iter().any(|v| c.contains(v))))
    })
}

/// A path connects in a bidirected graph when all its interior vertices,
/// colliders by construction, lie in C.
pub fn separated_bidirected(g: &Graph, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    a.iter().all(|&x| {
        b.iter().all(|&y| simple_paths(g, x, y).iter().all(|p| !interior(p).iter().all(|v| c.contains(v))))
    })
}

/// `v` is an ancestor of some vertex of `set` (vertices are their own
/// ancestors).
pub fn is_ancestor_of_set(g: &Graph, v: usize, set: &[usize]) -> bool {
    let mut seen = vec![false; g.p()];
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if set.contains(&u) {
            return true;
        }
        if seen[u] {
            continue;
        }
        seen[u] = true;
        stack.extend((0..g.p()).filter(|&w| g.has_edge(u, w)));
    }
    false
}

/// d-separation by checking every simple path for an active trail.
pub fn d_separated(g: &Graph, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    let active = |path: &[usize]| {
        (1..path.len() - 1).all(|k| {
            let (prev, v, next) = (path[k - 1], path[k], path[k + 1]);
            let collider = g.has_edge(prev, v) && g.has_edge(next, v);
            if collider {
                is_ancestor_of_set(g, v, c)
            } else {
                !c.contains(&v)
            }
        })
    };
    a.iter().all(|&x| b.iter().all(|&y| !simple_paths(g, x, y).iter().any(|p| active(p))))
}

/// Subsets of `pool` in order of size, lexicographic within a size.
pub fn subsets_by_size(pool: &[usize]) -> Vec<Vec<usize>> {
    let mut pool = pool.to_vec();
    pool.sort_unstable();
    let mut out = Vec::new();
    for size in 0..=pool.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&k| pool[k]).collect());
            // advance to the next combination
            let Some(pos) = (0..size).rev().find(|&k| idx[k] != k + pool.len() - size) else { break };
            idx[pos] += 1;
            for k in pos + 1..size {
                idx[k] = idx[k - 1] + 1;
            }
        }
    }
    out
}

/// First subset of `pool` (smallest, then lexicographically) satisfying
/// `separates`.
pub fn brute_min_separator(pool: &[usize], separates: impl Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
    subsets_by_size(pool).into_iter().find(|s| separates(s))
}

/// Random graph on `p` vertices with edge probability `density`. Directed
/// graphs point forward in `order`.
pub fn random_graph(rng: &mut impl Rng, p: usize, kind: EdgeKind, density: f64, order: Option<&VertexOrder>) -> Graph {
    let mut g = Graph::empty(p, kind);
    for a in 0..p {
        for b in a + 1..p {
            if rng.random_bool(density) {
                let (i, j) = match order {
                    Some(o) if o.rank(a) > o.rank(b) => (b, a),
                    _ => (a, b),
                };
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

pub fn random_order(rng: &mut impl Rng, p: usize) -> VertexOrder {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..p).collect();
    v.shuffle(rng);
    VertexOrder::new(v).unwrap()
}

/// Random disjoint (A, B, C) with A and B nonempty.
pub fn random_triple(rng: &mut impl Rng, p: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    loop {
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for v in 0..p {
            match rng.random_range(0..5) {
                0 => a.push(v),
                1 => b.push(v),
                2 | 3 => c.push(v),
                _ => {}
            }
        }
        if !a.is_empty() && !b.is_empty() {
            return (a, b, c);
        }
    }
}

/// Partial correlation by the recursion
/// `ρ_{ij·Ck} = (ρ_{ij·C} - ρ_{ik·C} ρ_{jk·C}) / √((1 - ρ_{ik·C}²)(1 - ρ_{jk·C}²))`.
pub fn partial_corr_recursive(s: &DMatrix<f64>, i: usize, j: usize, cond: &[usize]) -> f64 {
    match cond.split_last() {
        None => s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt(),
        Some((&k, rest)) => {
            let rij = partial_corr_recursive(s, i, j, rest);
            let rik = partial_corr_recursive(s, i, k, rest);
            let rjk = partial_corr_recursive(s, j, k, rest);
            (rij - rik * rjk) / ((1.0 - rik * rik) * (1.0 - rjk * rjk)).sqrt()
        }
    }
}

/// Random covariance matrix `B Bᵗ + I` with standard normal `B`.
pub fn random_covariance(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let b: DMatrix<f64> = DMatrix::from_fn(p, p, |_, _| StandardNormal.sample(rng));
    &b * b.transpose() * (1.0 / p as f64) + DMatrix::identity(p, p)
}
