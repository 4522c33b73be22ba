//! Simple undirected graphs with integer vertex and edge weights.
//!
//! Vertex ids are dense `0..n`. Adjacency is stored in CSR form with every
//! neighbour list sorted, so all iteration orders are deterministic.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    slot_edge: Vec<EdgeId>,
    edges: Vec<(VertexId, VertexId)>,
    edge_weight: Vec<u64>,
    vertex_weight: Vec<u64>,
    total_weight: u64,
}

impl Graph {
    /// Builds a graph from an edge list with unit weights. Self-loops are an error;
    /// duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        b.build()
    }

    pub fn empty(n: usize) -> Graph {
        GraphBuilder::new(n).build().expect("empty graph is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vertex_weight.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbours of `v` paired with the id of the connecting edge.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.slot_edge[r].iter().copied())
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Endpoints `(u, v)` with `u < v`.
    #[inline]
    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    #[inline]
    pub fn edge_weight(&self, e: EdgeId) -> u64 {
        self.edge_weight[e]
    }

    pub fn has_unit_edge_weights(&self) -> bool {
        self.edge_weight.iter().all(|&w| w == 1)
    }

    #[inline]
    pub fn vertex_weight(&self, v: VertexId) -> u64 {
        self.vertex_weight[v]
    }

    pub fn vertex_weights(&self) -> &[u64] {
        &self.vertex_weight
    }

    /// w(V), exact.
    #[inline]
    pub fn total_vertex_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        let nb = self.neighbors(u);
        nb.binary_search(&v)
            .ok()
            .map(|i| self.slot_edge[self.offsets[u] + i])
    }

    /// Same topology with new vertex weights.
    pub fn with_vertex_weights(&self, weights: Vec<u64>) -> Result<Graph, GraphError> {
        assert_eq!(weights.len(), self.n());
        let total = checked_sum(&weights)?;
        Ok(Graph {
            vertex_weight: weights,
            total_weight: total,
            ..self.clone()
        })
    }

    /// Labels vertices accepted by `alive` with their component index
    /// (components numbered by smallest contained id); rejected vertices get
    /// `usize::MAX`.
    pub fn component_labels(&self, alive: impl Fn(VertexId) -> bool) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX || !alive(s) {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if label[v] == usize::MAX && alive(v) {
                        label[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Components of the subgraph induced by the vertices accepted by `alive`,
    /// each sorted, ordered by smallest id.
    pub fn components_where(&self, alive: impl Fn(VertexId) -> bool) -> Vec<Vec<VertexId>> {
        let (label, count) = self.component_labels(alive);
        let mut out = vec![Vec::new(); count];
        for (v, &l) in label.iter().enumerate() {
            if l != usize::MAX {
                out[l].push(v);
            }
        }
        out
    }

    /// Hop distances from `s` over vertices accepted by `alive`
    /// (`usize::MAX` = unreachable).
    pub fn bfs_distances(&self, s: VertexId, alive: impl Fn(VertexId) -> bool) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        if !alive(s) {
            return dist;
        }
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in self.neighbors(u) {
                if dist[v] == usize::MAX && alive(v) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        dist
    }
}

fn checked_sum(ws: &[u64]) -> Result<u64, GraphError> {
    ws.iter()
        .try_fold(0u64, |acc, &w| acc.checked_add(w))
        .ok_or(GraphError::WeightOverflow)
}

/// Accumulates edges and weights, then produces a validated [`Graph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    edges: Vec<(VertexId, VertexId, u64)>,
    vertex_weight: Vec<u64>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            n,
            edges: Vec::new(),
            vertex_weight: vec![1; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Grows the vertex range so that `v` is a valid id.
    pub fn ensure_vertex(&mut self, v: VertexId) {
        if v >= self.n {
            self.n = v + 1;
            self.vertex_weight.resize(self.n, 1);
        }
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.add_weighted_edge(u, v, 1)
    }

    pub fn add_weighted_edge(&mut self, u: VertexId, v: VertexId, w: u64) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop { line: 0, vertex: u });
        }
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        self.edges.push((u.min(v), u.max(v), w));
        Ok(())
    }

    pub fn set_vertex_weight(&mut self, v: VertexId, w: u64) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        self.vertex_weight[v] = w;
        Ok(())
    }

    /// Sorts, deduplicates (first weight wins) and lays out the CSR arrays.
    pub fn build(mut self) -> Result<Graph, GraphError> {
        let total_weight = checked_sum(&self.vertex_weight)?;
        // stable sort keeps the first occurrence of a duplicate first
        self.edges.sort_by_key(|&(u, v, _)| (u, v));
        self.edges.dedup_by_key(|&mut (u, v, _)| (u, v));
        let n = self.n;
        let mut deg = vec![0usize; n + 1];
        for &(u, v, _) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        let mut slot_edge = vec![0; offsets[n]];
        for (e, &(u, v, _)) in self.edges.iter().enumerate() {
            targets[fill[u]] = v;
            slot_edge[fill[u]] = e;
            fill[u] += 1;
            targets[fill[v]] = u;
            slot_edge[fill[v]] = e;
            fill[v] += 1;
        }
        // edges are sorted by (min, max), so each list is already ascending
        // for the larger endpoints; sort anyway to cover the mixed case
        for v in 0..n {
            let r = offsets[v]..offsets[v + 1];
            let mut pairs: Vec<(VertexId, EdgeId)> = targets[r.clone()]
                .iter()
                .copied()
                .zip(slot_edge[r.clone()].iter().copied())
                .collect();
            pairs.sort_unstable();
            for (i, (t, e)) in pairs.into_iter().enumerate() {
                targets[r.start + i] = t;
                slot_edge[r.start + i] = e;
            }
        }
        Ok(Graph {
            offsets,
            targets,
            slot_edge,
            edges: self.edges.iter().map(|&(u, v, _)| (u, v)).collect(),
            edge_weight: self.edges.iter().map(|&(_, _, w)| w).collect(),
            vertex_weight: self.vertex_weight,
            total_weight,
        })
    }
}

/// Membership set over the vertex ids of a host graph: O(1) test, iteration in
/// insertion order.
#[derive(Clone, Debug, Default)]
pub struct VertexSet {
    mask: Vec<bool>,
    members: Vec<VertexId>,
}

impl PartialEq for VertexSet {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.members.iter().all(|&v| other.contains(v))
    }
}

impl Eq for VertexSet {}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            mask: vec![false; n],
            members: Vec::new(),
        }
    }

    pub fn from_iter<I: IntoIterator<Item = VertexId>>(n: usize, it: I) -> Self {
        let mut s = VertexSet::new(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    pub fn full(n: usize) -> Self {
        VertexSet {
            mask: vec![true; n],
            members: (0..n).collect(),
        }
    }

    /// Returns `true` when `v` was not yet present.
    pub fn insert(&mut self, v: VertexId) -> bool {
        if self.mask[v] {
            return false;
        }
        self.mask[v] = true;
        self.members.push(v);
        true
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        if !self.mask[v] {
            return false;
        }
        self.mask[v] = false;
        self.members.retain(|&x| x != v);
        true
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        v < self.mask.len() && self.mask[v]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Size of the id universe.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.members
    }

    pub fn to_sorted_vec(&self) -> Vec<VertexId> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Read-only neighbor enumeration, implemented by graphs and by spanner
/// views of a graph.
pub trait Adjacency {
    fn for_each_neighbor(&self, v: VertexId, f: impl FnMut(VertexId));
}

impl Adjacency for Graph {
    #[inline]
    fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId)) {
        for &u in self.neighbors(v) {
            f(u);
        }
    }
}

/// Vertex set with O(1) insert, remove and membership; iteration order is
/// arbitrary but deterministic.
#[derive(Clone, Debug)]
pub struct SwapSet {
    pos: Vec<usize>,
    items: Vec<VertexId>,
}

impl SwapSet {
    const ABSENT: usize = usize::MAX;

    pub fn new(n: usize) -> Self {
        SwapSet { pos: vec![Self::ABSENT; n], items: Vec::new() }
    }

    pub fn from_iter<I: IntoIterator<Item = VertexId>>(n: usize, it: I) -> Self {
        let mut s = SwapSet::new(n);
        for v in it {
            s.insert(v);
        }
        s
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.pos[v] != Self::ABSENT
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        if self.contains(v) {
            return false;
        }
        self.pos[v] = self.items.len();
        self.items.push(v);
        true
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        let i = self.pos[v];
        if i == Self::ABSENT {
            return false;
        }
        let last = *self.items.last().unwrap();
        self.items.swap_remove(i);
        if last != v {
            self.pos[last] = i;
        }
        self.pos[v] = Self::ABSENT;
        true
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.items
    }

    pub fn to_sorted_vec(&self) -> Vec<VertexId> {
        let mut v = self.items.clone();
        v.sort_unstable();
        v
    }
}

/// N^δ(X): all vertices within hop distance `delta` of `x`.
pub fn neighborhood(g: &Graph, x: &VertexSet, delta: usize) -> VertexSet {
    let mut out = VertexSet::new(g.n());
    let mut frontier: Vec<VertexId> = Vec::new();
    for v in x.iter() {
        if out.insert(v) {
            frontier.push(v);
        }
    }
    for _ in 0..delta {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if out.insert(v) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

/// G[X] with ids renumbered in increasing order of the original ids; the
/// returned vector maps new id → original id.
pub fn induced_subgraph(g: &Graph, x: &VertexSet) -> (Graph, Vec<VertexId>) {
    let map = x.to_sorted_vec();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in map.iter().enumerate() {
        local[v] = i;
    }
    let mut b = GraphBuilder::new(map.len());
    for (i, &v) in map.iter().enumerate() {
        b.vertex_weight[i] = g.vertex_weight(v);
        for (u, e) in g.incident(v) {
            let j = local[u];
            if j != usize::MAX && i < j {
                b.edges.push((i, j, g.edge_weight(e)));
            }
        }
    }
    (b.build().expect("induced subgraph of a valid graph"), map)
}

/// Subgraph on `vertices` (sorted, any order accepted) keeping only the listed
/// edges of `g`; returns the graph and the local → original id map.
pub fn edge_subgraph(g: &Graph, vertices: &[VertexId], edge_ids: &[EdgeId], weights: impl Fn(VertexId) -> u64) -> (Graph, Vec<VertexId>) {
    let mut map = vertices.to_vec();
    map.sort_unstable();
    map.dedup();
    let mut b = GraphBuilder::new(map.len());
    for (i, &v) in map.iter().enumerate() {
        b.vertex_weight[i] = weights(v);
    }
    for &e in edge_ids {
        let (u, v) = g.edge(e);
        let i = map.binary_search(&u).expect("edge endpoint in vertex list");
        let j = map.binary_search(&v).expect("edge endpoint in vertex list");
        b.edges.push((i.min(j), i.max(j), g.edge_weight(e)));
    }
    (b.build().expect("edge subgraph of a valid graph"), map)
}

/// Maximal connected vertex sets, ordered by smallest contained id.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    g.components_where(|_| true)
        .into_iter()
        .map(|c| VertexSet::from_iter(g.n(), c))
        .collect()
}

/// w(X), exact.
pub fn total_weight(g: &Graph, x: &VertexSet) -> u64 {
    x.iter().map(|v| g.vertex_weight(v)).sum()
}

/// Extremal-edge bound used by the density guard.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum GuardPolicy {
    /// `m > 2^(h-2) * n / 2`: average degree at least `2^(h-2)` forces a K_h minor.
    #[default]
    MaderProven,
    /// `m > c_t * h * sqrt(max(1, ln h)) * n`; algorithmic control flow only.
    ThomasonSoft { c_t: f64 },
}

impl GuardPolicy {
    pub const DEFAULT_C_T: f64 = 4.0;

    pub fn thomason() -> Self {
        GuardPolicy::ThomasonSoft { c_t: Self::DEFAULT_C_T }
    }

    /// Largest edge count that does not trigger the guard.
    pub fn threshold(&self, h: usize, n: usize) -> u64 {
        match *self {
            GuardPolicy::MaderProven => {
                let h = h.max(2);
                if h - 2 >= 64 {
                    return u64::MAX;
                }
                let t = ((1u128 << (h - 2)) * n as u128) / 2;
                u64::try_from(t).unwrap_or(u64::MAX)
            }
            GuardPolicy::ThomasonSoft { c_t } => {
                let hf = h as f64;
                let t = c_t * hf * hf.ln().max(1.0).sqrt() * n as f64;
                if t >= u64::MAX as f64 {
                    u64::MAX
                } else {
                    t.floor() as u64
                }
            }
        }
    }
}

/// Edge-count proof that a graph (or a minor of it) exceeds the extremal bound
/// for excluding K_h.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub threshold: u64,
    pub policy: GuardPolicy,
}

impl DensityCertificate {
    /// Recomputes the threshold and checks `m > threshold`.
    pub fn is_consistent(&self) -> bool {
        self.threshold == self.policy.threshold(self.h, self.n) && self.m as u64 > self.threshold
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GuardOutcome {
    Pass,
    Dense(DensityCertificate),
}

pub fn density_check(n: usize, m: usize, h: usize, policy: GuardPolicy) -> GuardOutcome {
    let threshold = policy.threshold(h, n);
    if m as u64 > threshold {
        GuardOutcome::Dense(DensityCertificate { n, m, h, threshold, policy })
    } else {
        GuardOutcome::Pass
    }
}

pub fn sparsity_guard(g: &Graph, h: usize, policy: GuardPolicy) -> GuardOutcome {
    density_check(g.n(), g.m(), h, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    fn grid(k: usize) -> Graph {
        let mut e = Vec::new();
        for r in 0..k {
            for c in 0..k {
                let v = r * k + c;
                if c + 1 < k {
                    e.push((v, v + 1));
                }
                if r + 1 < k {
                    e.push((v, v + k));
                }
            }
        }
        Graph::from_edges(k * k, &e).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn builder_dedups_and_rejects_loops() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(matches!(Graph::from_edges(2, &[(1, 1)]), Err(GraphError::SelfLoop { .. })));
    }

    #[test]
    fn neighborhood_on_path() {
        let g = path(4);
        let x = VertexSet::from_iter(4, [0]);
        assert_eq!(neighborhood(&g, &x, 1).to_sorted_vec(), vec![0, 1]);
        assert_eq!(neighborhood(&g, &x, 2).to_sorted_vec(), vec![0, 1, 2]);
        assert!(neighborhood(&g, &VertexSet::new(4), 3).is_empty());
    }

    #[test]
    fn induced_subgraphs() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (h, map) = induced_subgraph(&c4, &VertexSet::from_iter(4, [0, 1]));
        assert_eq!((h.n(), h.m()), (2, 1));
        assert_eq!(map, vec![0, 1]);
        let (h, _) = induced_subgraph(&c4, &VertexSet::from_iter(4, [0, 2]));
        assert_eq!((h.n(), h.m()), (2, 0));
        let (h, _) = induced_subgraph(&complete(5), &VertexSet::from_iter(5, [1, 3, 4]));
        assert_eq!(h, complete(3));
    }

    #[test]
    fn components() {
        assert!(connected_components(&Graph::empty(0)).is_empty());
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let cs = connected_components(&two);
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.len() == 2));
        assert_eq!(cs[0].to_sorted_vec(), vec![0, 1]);
        let g = grid(3);
        assert_eq!((g.n(), g.m()), (9, 12));
        let cs = connected_components(&g);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 9);
    }

    #[test]
    fn weights() {
        let g = grid(3);
        assert_eq!(total_weight(&g, &VertexSet::from_iter(9, 0..5)), 5);
        assert_eq!(total_weight(&g, &VertexSet::new(9)), 0);
        let mut b = GraphBuilder::new(3);
        for (v, w) in [(0, 1), (1, 2), (2, 4)] {
            b.set_vertex_weight(v, w).unwrap();
        }
        let g = b.build().unwrap();
        assert_eq!(total_weight(&g, &VertexSet::full(3)), 7);
        let mut b = GraphBuilder::new(2);
        b.set_vertex_weight(0, u64::MAX).unwrap();
        assert_eq!(b.build().unwrap_err(), GraphError::WeightOverflow);
    }

    #[test]
    fn guard_examples() {
        match sparsity_guard(&complete(5), 3, GuardPolicy::MaderProven) {
            GuardOutcome::Dense(c) => {
                assert_eq!((c.m, c.threshold), (10, 5));
                assert!(c.is_consistent());
            }
            GuardOutcome::Pass => panic!("K5 must trip the h=3 guard"),
        }
        assert_eq!(sparsity_guard(&Graph::empty(0), 4, GuardPolicy::MaderProven), GuardOutcome::Pass);
        assert_eq!(sparsity_guard(&Graph::empty(7), 2, GuardPolicy::thomason()), GuardOutcome::Pass);
        assert_eq!(sparsity_guard(&grid(3), 5, GuardPolicy::thomason()), GuardOutcome::Pass);
    }

    #[test]
    fn mader_threshold_saturates() {
        assert_eq!(GuardPolicy::MaderProven.threshold(80, 10), u64::MAX);
        assert_eq!(GuardPolicy::MaderProven.threshold(2, 5), 2);
    }
}
