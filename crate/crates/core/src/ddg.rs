//! Dense distance graphs on cluster boundaries, spanners of their passive
//! restrictions, the union graph `S_X` over `C_X`, and the search that either
//! finds a shallow tree reaching every branch-set neighbourhood or a pair of
//! far-apart vertices.
//!
//! Lengths are hop counts.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use crate::active::{ActiveState, ClusterIndex};
use crate::clustering::{mix, Cluster, NestedClustering};
use crate::error::{Result, SepError};
use crate::graph::{Graph, GraphBuilder, VertexId};
use crate::par::{self, Parallelism};
use crate::paths::INF;
use crate::spanner::build_spanner;

const NONE: u32 = u32::MAX;

/// One shortest-path tree per boundary vertex of a cluster, each in
/// `C - (δC \ {u})`, as local parent arrays.
#[derive(Clone, Debug)]
pub struct PathTrees {
    pub cluster: usize,
    /// Full boundary `δC`, sorted; row `i` belongs to `sources[i]`.
    pub sources: Vec<VertexId>,
    parent: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct DenseDistanceGraph {
    pub cluster: usize,
    /// The vertex set `B ⊆ δC`, sorted.
    pub vertices: Vec<VertexId>,
    /// `|B| × |B|` row-major; `INF` when no path avoids the other boundary
    /// vertices.
    pub dist: Vec<u64>,
    /// Row of each vertex of `B` in `trees.sources`.
    rows: Vec<usize>,
    pub trees: Arc<PathTrees>,
}

impl DenseDistanceGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> u64 {
        self.dist[i * self.vertices.len() + j]
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Vertices of the stored path from `u` to `v` (both in `B`), inclusive.
    pub fn path(&self, c: &Cluster, u: VertexId, v: VertexId) -> Option<Vec<VertexId>> {
        let i = self.position(u)?;
        let parent = &self.trees.parent[self.rows[i]];
        let (src, mut x) = (c.local_index(u)?, c.local_index(v)?);
        let mut out = vec![c.vertices[x]];
        while x != src {
            let p = parent[x];
            if p == NONE {
                return None;
            }
            x = p as usize;
            out.push(c.vertices[x]);
        }
        out.reverse();
        Some(out)
    }
}

/// Breadth-first search from every boundary vertex of the cluster, entering
/// other boundary vertices but never leaving them.
pub fn build_ddg(nc: &NestedClustering, index: &ClusterIndex, id: usize) -> DenseDistanceGraph {
    let c = &nc.clusters[id];
    let csr = &index.csr[id];
    let k = c.vertices.len();
    let sources = c.boundary.clone();
    let b = sources.len();
    let local: Vec<usize> = sources.iter().map(|&v| c.local_index(v).unwrap()).collect();
    let mut dist = vec![INF; b * b];
    let mut parents = Vec::with_capacity(b);
    let mut d = vec![u32::MAX; k];
    let mut queue = Vec::with_capacity(k);
    for (i, &s) in local.iter().enumerate() {
        let mut parent = vec![NONE; k];
        d.iter_mut().for_each(|x| *x = u32::MAX);
        queue.clear();
        d[s] = 0;
        queue.push(s);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            if u != s && csr.is_boundary[u] {
                continue;
            }
            for &w in csr.neighbors(u) {
                let w = w as usize;
                if d[w] == u32::MAX {
                    d[w] = d[u] + 1;
                    parent[w] = u as u32;
                    queue.push(w);
                }
            }
        }
        for (j, &t) in local.iter().enumerate() {
            if d[t] != u32::MAX {
                dist[i * b + j] = u64::from(d[t]);
            }
        }
        parents.push(parent);
    }
    DenseDistanceGraph {
        cluster: id,
        vertices: sources.clone(),
        dist,
        rows: (0..b).collect(),
        trees: Arc::new(PathTrees {
            cluster: id,
            sources,
            parent: parents,
        }),
    }
}

/// The subgraph induced by `subset`; path trees are shared.
pub fn restrict_ddg(ddg: &DenseDistanceGraph, subset: &[VertexId]) -> Result<DenseDistanceGraph> {
    let mut pos = Vec::with_capacity(subset.len());
    let mut vertices = subset.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    for &v in &vertices {
        pos.push(ddg.position(v).ok_or_else(|| SepError::Contract(format!("vertex {v} is not in the distance graph")))?);
    }
    let b = pos.len();
    let mut dist = Vec::with_capacity(b * b);
    for &i in &pos {
        for &j in &pos {
            dist.push(ddg.d(i, j));
        }
    }
    Ok(DenseDistanceGraph {
        cluster: ddg.cluster,
        vertices,
        dist,
        rows: pos.iter().map(|&i| ddg.rows[i]).collect(),
        trees: Arc::clone(&ddg.trees),
    })
}

/// `(2k-1)`-spanner of a distance graph, `k = ⌈1/ε⌉`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterSpanner {
    pub cluster: usize,
    pub k: usize,
    /// Vertex set of the spanned distance graph, sorted.
    pub vertices: Vec<VertexId>,
    /// `(u, v, length)` in global ids with `u < v`.
    pub edges: Vec<(VertexId, VertexId, u64)>,
    /// X-state version of the cluster this spanner was built for.
    pub version: u64,
}

pub fn spanner_k(eps: f64) -> usize {
    (1.0 / eps - 1e-9).ceil().max(1.0) as usize
}

pub fn build_cluster_spanner(ddg: &DenseDistanceGraph, eps: f64, seed: u64) -> ClusterSpanner {
    let k = spanner_k(eps);
    let b = ddg.len();
    let mut builder = GraphBuilder::new(b);
    for i in 0..b {
        for j in i + 1..b {
            let d = ddg.d(i, j);
            if d != INF {
                builder.add_weighted_edge(i, j, d).expect("distance graph edge");
            }
        }
    }
    let h = builder.build().expect("distance graph");
    let sp = build_spanner(&h, k, seed);
    let mut edges: Vec<(VertexId, VertexId, u64)> = sp
        .edges
        .iter()
        .map(|&e| {
            let (i, j) = h.edge(e);
            (ddg.vertices[i], ddg.vertices[j], h.edge_weight(e))
        })
        .collect();
    edges.sort_unstable();
    ClusterSpanner {
        cluster: ddg.cluster,
        k,
        vertices: ddg.vertices.clone(),
        edges,
        version: 0,
    }
}

/// Distance graphs and spanners for the clusters in use, built lazily and
/// rebuilt when a cluster's passive boundary changes.
#[derive(Clone, Debug)]
pub struct DdgLayer {
    pub eps: f64,
    pub seed: u64,
    ddgs: Vec<Option<Arc<DenseDistanceGraph>>>,
    spanners: Vec<Option<ClusterSpanner>>,
    pub ddg_builds: usize,
    pub spanner_builds: usize,
}

impl DdgLayer {
    pub fn new(nc: &NestedClustering, eps: f64, seed: u64) -> Self {
        DdgLayer {
            eps,
            seed,
            ddgs: vec![None; nc.clusters.len()],
            spanners: vec![None; nc.clusters.len()],
            ddg_builds: 0,
            spanner_builds: 0,
        }
    }

    pub fn k(&self) -> usize {
        spanner_k(self.eps)
    }

    pub fn ddg(&self, id: usize) -> Option<&DenseDistanceGraph> {
        self.ddgs[id].as_deref()
    }

    pub fn spanner(&self, id: usize) -> Option<&ClusterSpanner> {
        self.spanners[id].as_ref()
    }

    /// Builds missing distance graphs and stale spanners for `clusters`.
    pub fn refresh(&mut self, nc: &NestedClustering, index: &ClusterIndex, st: &ActiveState, clusters: &[usize], mode: Parallelism) {
        let missing: Vec<usize> = clusters.iter().copied().filter(|&id| self.ddgs[id].is_none()).collect();
        let built = par::map(mode, &missing, |&id| build_ddg(nc, index, id));
        self.ddg_builds += built.len();
        for (id, d) in missing.into_iter().zip(built) {
            self.ddgs[id] = Some(Arc::new(d));
        }
        let stale: Vec<usize> = clusters
            .iter()
            .copied()
            .filter(|&id| self.spanners[id].as_ref().is_none_or(|s| s.version != st.clusters[id].version))
            .collect();
        let ddgs = &self.ddgs;
        let (eps, seed) = (self.eps, self.seed);
        let fresh = par::map(mode, &stale, |&id| {
            let full = ddgs[id].as_ref().unwrap();
            let passive: Vec<VertexId> = full.vertices.iter().copied().filter(|&v| !st.is_active(v)).collect();
            let restricted = restrict_ddg(full, &passive).expect("passive boundary is a subset");
            let mut sp = build_cluster_spanner(&restricted, eps, mix(seed, id as u64));
            sp.version = st.clusters[id].version;
            sp
        });
        self.spanner_builds += fresh.len();
        for (id, sp) in stale.into_iter().zip(fresh) {
            self.spanners[id] = Some(sp);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SxEdge {
    pub to: u32,
    pub len: u64,
    pub cluster: u32,
}

/// Union of the cluster spanners over `C_X` on the passive boundary vertices.
#[derive(Clone, Debug, Default)]
pub struct UnionGraph {
    /// Sorted global ids.
    pub vertices: Vec<VertexId>,
    pub adj: Vec<Vec<SxEdge>>,
    pub edge_count: usize,
}

impl UnionGraph {
    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// `(u, v, length, cluster)` with `u < v`, each edge once per cluster.
    pub fn edge_list(&self) -> Vec<(VertexId, VertexId, u64, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, es) in self.adj.iter().enumerate() {
            for e in es {
                if (i as u32) < e.to {
                    out.push((self.vertices[i], self.vertices[e.to as usize], e.len, e.cluster as usize));
                }
            }
        }
        out
    }
}

pub fn assemble_sx(nc: &NestedClustering, st: &ActiveState, layer: &DdgLayer, cx: &[usize]) -> Result<UnionGraph> {
    let mut vertices: Vec<VertexId> = Vec::new();
    for &id in cx {
        let sp = layer
            .spanner(id)
            .filter(|s| s.version == st.clusters[id].version)
            .ok_or_else(|| SepError::Contract(format!("spanner of cluster {id} is missing or stale")))?;
        vertices.extend_from_slice(&sp.vertices);
    }
    debug_assert!(cx.iter().all(|&id| nc.clusters[id].boundary.iter().all(|&v| st.is_active(v) || layer.spanner(id).unwrap().vertices.binary_search(&v).is_ok())));
    vertices.sort_unstable();
    vertices.dedup();
    let mut adj = vec![Vec::new(); vertices.len()];
    let mut edge_count = 0;
    for &id in cx {
        for &(u, v, len) in &layer.spanner(id).unwrap().edges {
            let (i, j) = (vertices.binary_search(&u).unwrap(), vertices.binary_search(&v).unwrap());
            adj[i].push(SxEdge { to: j as u32, len, cluster: id as u32 });
            adj[j].push(SxEdge { to: i as u32, len, cluster: id as u32 });
            edge_count += 1;
        }
    }
    Ok(UnionGraph { vertices, adj, edge_count })
}

/// Shortest-path tree in `S_X`: distances and the edge into each vertex.
#[derive(Clone, Debug)]
pub struct SxTree {
    pub root: usize,
    pub dist: Vec<u64>,
    /// `(predecessor position, edge length, cluster)`.
    pub pred: Vec<Option<(u32, u64, u32)>>,
}

impl SxTree {
    /// Edges `(from, to, length, cluster)` of the tree path from the root to
    /// `t`, in root-to-`t` order.
    pub fn path_edges(&self, t: usize) -> Vec<(usize, usize, u64, usize)> {
        let mut out = Vec::new();
        let mut x = t;
        while let Some((p, len, c)) = self.pred[x] {
            out.push((p as usize, x, len, c as usize));
            x = p as usize;
        }
        out.reverse();
        out
    }
}

pub fn sssp_sx(sx: &UnionGraph, s: VertexId) -> Result<SxTree> {
    let root = sx.position(s).ok_or_else(|| SepError::Contract(format!("vertex {s} is not in S_X")))?;
    let n = sx.vertices.len();
    let mut dist = vec![INF; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0;
    heap.push(Reverse((0u64, root)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for e in &sx.adj[u] {
            let v = e.to as usize;
            let nd = d + e.len;
            if nd < dist[v] {
                heap.push(Reverse((nd, v)));
                dist[v] = nd;
                pred[v] = Some((u as u32, e.len, e.cluster));
            }
        }
    }
    Ok(SxTree { root, dist, pred })
}

/// `A_1(C), …, A_p(C)` for one cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryLabelSets {
    pub cluster: usize,
    /// Sorted passive boundary vertices per branch set.
    pub sets: Vec<Vec<VertexId>>,
}

/// Depth-first search inside cluster `id` from each active boundary vertex of
/// branch set `i`, over passive vertices and the cluster's own edges; searches
/// for the same `i` share their marks. `branch_of[v]` is the branch set of
/// `v` or `u32::MAX`.
pub fn compute_ai_boundary_sets(nc: &NestedClustering, index: &ClusterIndex, st: &ActiveState, id: usize, branch_of: &[u32], p: usize) -> BoundaryLabelSets {
    let c = &nc.clusters[id];
    let csr = &index.csr[id];
    let mut sets = vec![Vec::new(); p];
    let mut starts: Vec<(u32, usize)> = (0..c.vertices.len())
        .filter(|&j| csr.is_boundary[j] && st.is_active(c.vertices[j]) && (branch_of[c.vertices[j]] as usize) < p)
        .map(|j| (branch_of[c.vertices[j]], j))
        .collect();
    starts.sort_unstable();
    let mut mark = vec![NONE; c.vertices.len()];
    let mut stack = Vec::new();
    for (i, j) in starts {
        stack.push(j);
        while let Some(u) = stack.pop() {
            for &w in csr.neighbors(u) {
                let w = w as usize;
                if mark[w] == i || st.is_active(c.vertices[w]) {
                    continue;
                }
                mark[w] = i;
                if csr.is_boundary[w] {
                    sets[i as usize].push(c.vertices[w]);
                }
                stack.push(w);
            }
        }
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    BoundaryLabelSets { cluster: id, sets }
}

/// Label sets for every cluster of `cx`, in the order of `cx`.
pub fn compute_all_boundary_sets(nc: &NestedClustering, index: &ClusterIndex, st: &ActiveState, cx: &[usize], branch_of: &[u32], p: usize, mode: Parallelism) -> Vec<BoundaryLabelSets> {
    par::map(mode, cx, |&id| compute_ai_boundary_sets(nc, index, st, id, branch_of, p))
}

/// A tree in `G - X` rooted at `root`, touching every branch set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrownTree {
    pub root: VertexId,
    /// Sorted.
    pub vertices: Vec<VertexId>,
    /// Parent of `vertices[i]`; the root is its own parent.
    pub parent: Vec<VertexId>,
    pub depth: usize,
    /// `touch[i]` is a tree vertex adjacent to branch set `i`.
    pub touch: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeOrFarPair {
    /// No vertex of the component is adjacent to branch set `i`.
    EmptyIndex(usize),
    Tree(GrownTree),
    /// `d_{S_X}(s, t) = sx_dist` is at least the far threshold.
    FarPair { s: VertexId, t: VertexId, sx_dist: u64 },
}

/// `8ℓ·ln n·(2k-1)`.
pub fn far_threshold(ell: usize, n: usize, k: usize) -> f64 {
    8.0 * ell as f64 * (n.max(2) as f64).ln() * (2 * k - 1) as f64
}

/// Everything the search reads; all of it must be current for `st`.
pub struct SxSearch<'a> {
    pub g: &'a Graph,
    pub nc: &'a NestedClustering,
    pub index: &'a ClusterIndex,
    pub st: &'a ActiveState,
    pub layer: &'a DdgLayer,
    pub sx: &'a UnionGraph,
}

impl SxSearch<'_> {
    /// Searches `S_X` from `s`. `labels` must come from
    /// [`compute_all_boundary_sets`] for the same state.
    pub fn find_tree_or_far_pair(&self, labels: &[BoundaryLabelSets], branch_of: &[u32], p: usize, s: VertexId, ell: usize) -> Result<TreeOrFarPair> {
        if self.st.is_active(s) {
            return Err(SepError::Contract(format!("search root {s} is active")));
        }
        if p == 0 {
            return Ok(TreeOrFarPair::Tree(GrownTree {
                root: s,
                vertices: vec![s],
                parent: vec![s],
                depth: 0,
                touch: Vec::new(),
            }));
        }
        let tree = sssp_sx(self.sx, s)?;
        // (distance, vertex, cluster) of the nearest representative per index
        let mut best: Vec<Option<(u64, VertexId, usize)>> = vec![None; p];
        for lab in labels {
            for (i, set) in lab.sets.iter().enumerate() {
                for &b in set {
                    let Some(pos) = self.sx.position(b) else { continue };
                    let d = tree.dist[pos];
                    if d == INF {
                        continue;
                    }
                    let cand = (d, b, lab.cluster);
                    if best[i].is_none_or(|cur| cand < cur) {
                        best[i] = Some(cand);
                    }
                }
            }
        }
        if let Some(i) = best.iter().position(Option::is_none) {
            return Ok(TreeOrFarPair::EmptyIndex(i));
        }
        let best: Vec<(u64, VertexId, usize)> = best.into_iter().map(Option::unwrap).collect();
        let threshold = far_threshold(ell, self.g.n(), self.layer.k());
        if let Some(&(d, t, _)) = best.iter().filter(|b| b.0 as f64 >= threshold).max() {
            return Ok(TreeOrFarPair::FarPair { s, t, sx_dist: d });
        }
        let mut parent: HashMap<VertexId, (VertexId, usize)> = HashMap::new();
        parent.insert(s, (s, 0));
        let mut add = |walk: &[VertexId]| {
            for w in walk.windows(2) {
                if !parent.contains_key(&w[1]) {
                    let depth = parent[&w[0]].1 + 1;
                    parent.insert(w[1], (w[0], depth));
                }
            }
        };
        let mut touch = Vec::with_capacity(p);
        for (i, &(_, a, cluster)) in best.iter().enumerate() {
            let mut walk = vec![s];
            for (from, to, len, cid) in tree.path_edges(self.sx.position(a).unwrap()) {
                let (u, v) = (self.sx.vertices[from], self.sx.vertices[to]);
                let ddg = self.layer.ddg(cid).ok_or_else(|| SepError::Contract(format!("no distance graph for cluster {cid}")))?;
                let path = ddg
                    .path(&self.nc.clusters[cid], u, v)
                    .ok_or_else(|| SepError::Internal(format!("no stored path {u}-{v} in cluster {cid}")))?;
                debug_assert_eq!(path.len() as u64 - 1, len);
                walk.extend_from_slice(&path[1..]);
            }
            let ext = self
                .extend_to_branch(cluster, a, i as u32, branch_of)
                .ok_or_else(|| SepError::Internal(format!("branch set {i} not reachable from {a} in cluster {cluster}")))?;
            touch.push(*ext.last().unwrap());
            walk.extend_from_slice(&ext[1..]);
            add(&walk);
        }
        let mut vertices: Vec<VertexId> = parent.keys().copied().collect();
        vertices.sort_unstable();
        let depth = parent.values().map(|&(_, d)| d).max().unwrap_or(0);
        let parents = vertices.iter().map(|v| parent[v].0).collect();
        Ok(TreeOrFarPair::Tree(GrownTree {
            root: s,
            vertices,
            parent: parents,
            depth,
            touch,
        }))
    }

    /// Breadth-first search from `a` over passive vertices of cluster `id`
    /// to the first vertex with a cluster edge into branch set `i`.
    fn extend_to_branch(&self, id: usize, a: VertexId, i: u32, branch_of: &[u32]) -> Option<Vec<VertexId>> {
        let c = &self.nc.clusters[id];
        let csr = &self.index.csr[id];
        let touches = |u: usize| csr.neighbors(u).iter().any(|&w| {
            let w = c.vertices[w as usize];
            self.st.is_active(w) && branch_of[w] == i
        });
        let src = c.local_index(a)?;
        let mut prev = vec![NONE; c.vertices.len()];
        prev[src] = src as u32;
        let mut queue = vec![src];
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            if touches(u) {
                let mut out = vec![c.vertices[u]];
                let mut x = u;
                while x != src {
                    x = prev[x] as usize;
                    out.push(c.vertices[x]);
                }
                out.reverse();
                return Some(out);
            }
            for &w in csr.neighbors(u) {
                let w = w as usize;
                if prev[w] == NONE && !self.st.is_active(c.vertices[w]) {
                    prev[w] = u as u32;
                    queue.push(w);
                }
            }
        }
        None
    }
}
