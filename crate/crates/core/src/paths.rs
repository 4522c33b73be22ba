//! Shortest-path primitives shared by the spanner and distance-graph code.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{EdgeId, Graph, VertexId};

pub const INF: u64 = u64::MAX;

/// Single-source distances over the edges accepted by `use_edge`.
pub fn dijkstra(g: &Graph, source: VertexId, use_edge: impl Fn(EdgeId) -> bool) -> Vec<u64> {
    let mut dist = vec![INF; g.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, e) in g.incident(u) {
            if !use_edge(e) {
                continue;
            }
            let nd = d.saturating_add(g.edge_weight(e));
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// All-pairs distances by repeated Dijkstra; intended for small graphs.
pub fn all_pairs(g: &Graph, use_edge: impl Fn(EdgeId) -> bool + Copy) -> Vec<Vec<u64>> {
    (0..g.n()).map(|s| dijkstra(g, s, use_edge)).collect()
}

/// Floyd–Warshall on a dense matrix (`INF` = no edge). Used as an independent
/// check of Dijkstra-based code.
pub fn floyd_warshall(mut d: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let n = d.len();
    for k in 0..n {
        // row k does not change while k is the pivot
        let rk = d[k].clone();
        for row in d.iter_mut() {
            let dik = row[k];
            if dik == INF {
                continue;
            }
            for (dij, &dkj) in row.iter_mut().zip(&rk) {
                if dkj != INF && dik + dkj < *dij {
                    *dij = dik + dkj;
                }
            }
        }
    }
    d
}
