//! Ball growth that either reaches every target set with a shallow tree or
//! stalls and yields a set with a thin δ-boundary on both sides.

use std::collections::VecDeque;

use crate::error::{Result, SepError};
use crate::graph::{Adjacency, Graph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeOrCut {
    /// `vertices[i]` has parent `parent[i]`; the root is its own parent.
    Tree {
        vertices: Vec<VertexId>,
        parent: Vec<VertexId>,
        root: VertexId,
        depth: usize,
        rounds: usize,
    },
    Cut { s: Vec<VertexId>, rounds: usize },
}

/// Upper bound on the number of growth rounds for a universe of `n` vertices:
/// `|R|` can grow by a factor `1 + 1/ℓ` at most `log_{1+1/ℓ} n` times and
/// `|V \ R|` can shrink by that factor at most as often, plus the final step
/// that empties it.
pub fn max_rounds(n: usize, ell: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let per = (n as f64).ln() / (1.0 + 1.0 / ell as f64).ln();
    2 * per.floor() as usize + 2
}

/// Depth bound for returned trees: every round advances the ball radius by
/// `2δ`.
pub fn max_depth(n: usize, ell: usize, delta: usize) -> usize {
    2 * delta * max_rounds(n, ell)
}

/// Runs the ball growth on `h`, whose edges are assumed to stay inside a
/// vertex universe of `universe_len` vertices containing `start`.
pub fn tree_or_cut_in<A: Adjacency>(
    h: &A,
    n_ids: usize,
    universe_len: usize,
    a_sets: &[Vec<VertexId>],
    ell: usize,
    delta: usize,
    start: VertexId,
) -> Result<TreeOrCut> {
    if ell == 0 || delta == 0 {
        return Err(SepError::InvalidParameter("ℓ and δ must be positive".into()));
    }
    if let Some(i) = a_sets.iter().position(|a| a.is_empty()) {
        return Err(SepError::Contract(format!("target set {i} is empty")));
    }
    let mut dist = vec![usize::MAX; n_ids];
    let mut parent = vec![usize::MAX; n_ids];
    let mut order: Vec<VertexId> = vec![start];
    dist[start] = 0;
    parent[start] = start;
    let mut head = 0;
    // BFS up to `radius`; returns number of vertices within it
    let mut grow = |radius: usize, order: &mut Vec<VertexId>, dist: &mut Vec<usize>, parent: &mut Vec<usize>| {
        while head < order.len() {
            let u = order[head];
            if dist[u] >= radius {
                break;
            }
            head += 1;
            let du = dist[u];
            h.for_each_neighbor(u, |v| {
                if dist[v] == usize::MAX {
                    dist[v] = du + 1;
                    parent[v] = u;
                    order.push(v);
                }
            });
        }
        // vertices with dist <= radius are a prefix of `order`
        order.partition_point(|&v| dist[v] <= radius)
    };
    let ell_u = ell as u128;
    let n = universe_len as u128;
    let mut rounds = 0usize;
    let mut r_size = 1usize;
    let mut radius = 0usize;
    loop {
        let next_size = grow(radius + 2 * delta, &mut order, &mut dist, &mut parent);
        let (a, b) = (r_size as u128, next_size as u128);
        let grows = ell_u * b >= (ell_u + 1) * a;
        let shrinks = ell_u * (n - a) >= (ell_u + 1) * (n - b);
        if next_size == r_size || !(grows || shrinks) {
            break;
        }
        r_size = next_size;
        radius += 2 * delta;
        rounds += 1;
    }
    if r_size == universe_len {
        let mut in_tree = vec![false; n_ids];
        let mut vertices = vec![start];
        in_tree[start] = true;
        let mut depth = 0;
        for a in a_sets {
            let target = a
                .iter()
                .copied()
                .filter(|&v| dist[v] != usize::MAX)
                .min_by_key(|&v| (dist[v], v))
                .ok_or_else(|| SepError::Internal("target set unreachable after full growth".into()))?;
            depth = depth.max(dist[target]);
            let mut x = target;
            while !in_tree[x] {
                in_tree[x] = true;
                vertices.push(x);
                x = parent[x];
            }
        }
        vertices.sort_unstable();
        let parents = vertices.iter().map(|&v| parent[v]).collect();
        return Ok(TreeOrCut::Tree {
            vertices,
            parent: parents,
            root: start,
            depth,
            rounds,
        });
    }
    let cut_size = grow(radius + delta, &mut order, &mut dist, &mut parent);
    let mut s: Vec<VertexId> = order[..cut_size].to_vec();
    s.sort_unstable();
    Ok(TreeOrCut::Cut { s, rounds })
}

/// Ball growth on a whole graph.
pub fn tree_or_cut(h: &Graph, a_sets: &[Vec<VertexId>], ell: usize, delta: usize, start: VertexId) -> Result<TreeOrCut> {
    tree_or_cut_in(h, h.n(), h.n(), a_sets, ell, delta, start)
}

/// Counts `|N^δ(S) \ S|` and `|N^δ(U \ S) ∩ S|` for `S ⊆ universe`.
pub fn cut_boundaries<A: Adjacency>(h: &A, n_ids: usize, universe: &[VertexId], s: &[VertexId], delta: usize) -> (usize, usize) {
    let mut in_s = vec![false; n_ids];
    for &v in s {
        in_s[v] = true;
    }
    let outside: Vec<VertexId> = universe.iter().copied().filter(|&v| !in_s[v]).collect();
    let reach = |sources: &[VertexId]| {
        let mut dist = vec![usize::MAX; n_ids];
        let mut q = VecDeque::new();
        for &v in sources {
            dist[v] = 0;
            q.push_back(v);
        }
        while let Some(u) = q.pop_front() {
            if dist[u] == delta {
                continue;
            }
            let du = dist[u];
            h.for_each_neighbor(u, |v| {
                if dist[v] == usize::MAX {
                    dist[v] = du + 1;
                    q.push_back(v);
                }
            });
        }
        dist
    };
    let from_s = reach(s);
    let a = outside.iter().filter(|&&v| from_s[v] != usize::MAX).count();
    let from_out = reach(&outside);
    let b = s.iter().filter(|&&v| from_out[v] != usize::MAX).count();
    (a, b)
}

/// Exact check of both thin-boundary conditions:
/// `ℓ·|N^δ(S) \ S| < min(|S|, |U \ S|)` and `ℓ·|N^δ(U \ S) ∩ S| < min(|S|, |U \ S|)`.
pub fn cut_conditions_hold<A: Adjacency>(h: &A, n_ids: usize, universe: &[VertexId], s: &[VertexId], ell: usize, delta: usize) -> (bool, bool) {
    let (a, b) = cut_boundaries(h, n_ids, universe, s, delta);
    let min = s.len().min(universe.len() - s.len());
    (ell * a < min, ell * b < min)
}

/// Checks a returned tree: parent pointers follow edges of `h`, every target
/// set is hit, and the depth measured from the root is as reported.
pub fn tree_is_valid<A: Adjacency>(h: &A, n_ids: usize, t: &TreeOrCut, a_sets: &[Vec<VertexId>]) -> bool {
    let TreeOrCut::Tree { vertices, parent, root, depth, .. } = t else {
        return false;
    };
    let mut in_tree = vec![false; n_ids];
    for &v in vertices {
        in_tree[v] = true;
    }
    let mut par = vec![usize::MAX; n_ids];
    for (&v, &p) in vertices.iter().zip(parent) {
        if !in_tree[p] {
            return false;
        }
        if v != *root {
            let mut adjacent = false;
            h.for_each_neighbor(v, |u| adjacent |= u == p);
            if !adjacent {
                return false;
            }
        }
        par[v] = p;
    }
    let mut measured = 0;
    for &v in vertices {
        let mut d = 0;
        let mut x = v;
        while x != *root {
            x = par[x];
            d += 1;
            if d > vertices.len() {
                return false;
            }
        }
        measured = measured.max(d);
    }
    measured == *depth && a_sets.iter().all(|a| a.iter().any(|&v| in_tree[v]))
}
