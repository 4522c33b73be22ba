//! Active/passive vertex bookkeeping over a nested clustering: X-clusters
//! per cluster, the antichain `C_X`, and the components of `G - X` that reach
//! a boundary vertex of `C_X`, assembled from X-clusters.

use std::collections::HashMap;

use crate::clustering::NestedClustering;
use crate::error::{Result, SepError};
use crate::graph::{Graph, VertexId};
use crate::par::{self, Parallelism};

const NONE: u32 = u32::MAX;

/// Cluster subgraph in compressed form over local indices.
#[derive(Clone, Debug)]
pub struct LocalCsr {
    pub offsets: Vec<u32>,
    pub targets: Vec<u32>,
    /// `is_boundary[i]` for local vertex `i`.
    pub is_boundary: Vec<bool>,
}

impl LocalCsr {
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.is_boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_boundary.is_empty()
    }
}

/// Per-cluster lookup structures shared by the active-state and
/// distance layers.
#[derive(Clone, Debug)]
pub struct ClusterIndex {
    pub csr: Vec<LocalCsr>,
    /// Clusters having the vertex on their boundary.
    pub boundary_of: Vec<Vec<u32>>,
    /// Deepest cluster having the vertex as an interior vertex.
    pub deepest_interior: Vec<u32>,
}

impl ClusterIndex {
    pub fn new(g: &Graph, nc: &NestedClustering, mode: Parallelism) -> Self {
        let csr = par::map(mode, &nc.clusters, |c| {
            let adj = c.local_adjacency(g);
            let mut offsets = Vec::with_capacity(adj.len() + 1);
            let mut targets = Vec::new();
            offsets.push(0);
            for a in &adj {
                targets.extend_from_slice(a);
                offsets.push(targets.len() as u32);
            }
            let is_boundary = c.vertices.iter().map(|&v| c.is_boundary(v)).collect();
            LocalCsr { offsets, targets, is_boundary }
        });
        let mut boundary_of = vec![Vec::new(); g.n()];
        let mut deepest_interior = vec![NONE; g.n()];
        for c in &nc.clusters {
            for &v in &c.boundary {
                boundary_of[v].push(c.id as u32);
            }
        }
        for c in &nc.clusters {
            for (i, &v) in c.vertices.iter().enumerate() {
                if csr[c.id].is_boundary[i] {
                    continue;
                }
                let d = deepest_interior[v];
                if d == NONE || nc.clusters[d as usize].level < c.level {
                    deepest_interior[v] = c.id as u32;
                }
            }
        }
        ClusterIndex {
            csr,
            boundary_of,
            deepest_interior,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexState {
    Passive,
    Active,
}

/// A component of `C - (δC ∩ X)` holding at least one passive boundary
/// vertex of `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XCluster {
    pub cluster: usize,
    pub weight: u64,
    pub size: usize,
    /// Passive boundary vertices, sorted.
    pub boundary: Vec<VertexId>,
}

/// X-clusters of one cluster plus the local label of each vertex.
#[derive(Clone, Debug, Default)]
pub struct ClusterXState {
    /// Local vertex → X-cluster index, `u32::MAX` outside every X-cluster.
    pub label: Vec<u32>,
    pub xclusters: Vec<XCluster>,
    /// Bumped on every recomputation.
    pub version: u64,
}

/// X-clusters of cluster `id` for the activity vector `active`.
pub fn compute_xclusters(g: &Graph, nc: &NestedClustering, index: &ClusterIndex, id: usize, active: &[bool]) -> (Vec<u32>, Vec<XCluster>) {
    let c = &nc.clusters[id];
    let csr = &index.csr[id];
    let k = c.vertices.len();
    let blocked = |i: usize| csr.is_boundary[i] && active[c.vertices[i]];
    let mut label = vec![NONE; k];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..k {
        if label[s] != NONE || blocked(s) || !csr.is_boundary[s] {
            continue;
        }
        let idx = out.len() as u32;
        let mut xc = XCluster {
            cluster: id,
            weight: 0,
            size: 0,
            boundary: Vec::new(),
        };
        label[s] = idx;
        stack.push(s);
        while let Some(u) = stack.pop() {
            let v = c.vertices[u];
            xc.weight += g.vertex_weight(v);
            xc.size += 1;
            if csr.is_boundary[u] {
                xc.boundary.push(v);
            }
            for &w in csr.neighbors(u) {
                let w = w as usize;
                if label[w] == NONE && !blocked(w) {
                    label[w] = idx;
                    stack.push(w);
                }
            }
        }
        xc.boundary.sort_unstable();
        out.push(xc);
    }
    (label, out)
}

/// Activity of every vertex with per-cluster X-clusters kept current.
#[derive(Clone, Debug)]
pub struct ActiveState {
    active: Vec<bool>,
    x_len: usize,
    cap: usize,
    activated: Vec<bool>,
    deactivated: Vec<bool>,
    /// Active interior vertices per cluster.
    interior_active: Vec<u32>,
    pub clusters: Vec<ClusterXState>,
    /// `(vertex, new state)` in order of application.
    pub flips: Vec<(VertexId, VertexState)>,
    pub max_x: usize,
    pub parallelism: Parallelism,
}

impl ActiveState {
    /// All vertices passive; `cap` bounds `|X|` at all times.
    pub fn new(g: &Graph, nc: &NestedClustering, index: &ClusterIndex, cap: usize, mode: Parallelism) -> Self {
        let n = g.n();
        let none = vec![false; n];
        let clusters = par::map_range(mode, nc.clusters.len(), |id| {
            let (label, xclusters) = compute_xclusters(g, nc, index, id, &none);
            ClusterXState { label, xclusters, version: 0 }
        });
        ActiveState {
            active: none,
            x_len: 0,
            cap,
            activated: vec![false; n],
            deactivated: vec![false; n],
            interior_active: vec![0; nc.clusters.len()],
            clusters,
            flips: Vec::new(),
            max_x: 0,
            parallelism: mode,
        }
    }

    pub fn is_active(&self, v: VertexId) -> bool {
        self.active[v]
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn x_len(&self) -> usize {
        self.x_len
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Flips `v`, enforcing the one-flip-each-way budget and the `|X|` cap,
    /// and recomputes the X-clusters of every cluster with `v` on its
    /// boundary. Returns the ids of those clusters.
    pub fn set_vertex_state(&mut self, g: &Graph, nc: &NestedClustering, index: &ClusterIndex, v: VertexId, to: VertexState) -> Result<Vec<usize>> {
        match to {
            VertexState::Active => {
                if self.active[v] || self.activated[v] {
                    return Err(SepError::Contract(format!("vertex {v} was already activated")));
                }
                if self.x_len + 1 > self.cap {
                    return Err(SepError::Contract(format!("|X| would exceed its cap {}", self.cap)));
                }
                self.activated[v] = true;
                self.x_len += 1;
                self.max_x = self.max_x.max(self.x_len);
            }
            VertexState::Passive => {
                if !self.active[v] || self.deactivated[v] {
                    return Err(SepError::Contract(format!("vertex {v} cannot be deactivated")));
                }
                self.deactivated[v] = true;
                self.x_len -= 1;
            }
        }
        self.active[v] = to == VertexState::Active;
        self.flips.push((v, to));
        let mut c = index.deepest_interior[v];
        while c != NONE {
            let cnt = &mut self.interior_active[c as usize];
            match to {
                VertexState::Active => *cnt += 1,
                VertexState::Passive => *cnt -= 1,
            }
            c = nc.clusters[c as usize].parent.map_or(NONE, |p| p as u32);
        }
        let touched: Vec<usize> = index.boundary_of[v].iter().map(|&c| c as usize).collect();
        let active = &self.active;
        let fresh = par::map(self.parallelism, &touched, |&id| compute_xclusters(g, nc, index, id, active));
        for (&id, (label, xclusters)) in touched.iter().zip(fresh) {
            let st = &mut self.clusters[id];
            st.label = label;
            st.xclusters = xclusters;
            st.version += 1;
        }
        Ok(touched)
    }

    /// `C_X`: level-1 clusters, each replaced by its children while it has an
    /// active interior vertex. Sorted ids.
    pub fn compute_c_x(&self, nc: &NestedClustering) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = nc.roots.iter().rev().copied().collect();
        while let Some(id) = stack.pop() {
            let c = &nc.clusters[id];
            if self.interior_active[id] > 0 && !c.children.is_empty() {
                stack.extend(c.children.iter().rev());
            } else {
                out.push(id);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Structural check of `C_X`: its clusters partition the edges of `G`, share
/// only boundary vertices, and every active vertex they contain is a
/// boundary vertex.
pub fn check_c_x(g: &Graph, nc: &NestedClustering, st: &ActiveState, cx: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    let mut owner = vec![usize::MAX; g.m()];
    let mut holders: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for &id in cx {
        let c = &nc.clusters[id];
        for &e in &c.edges {
            if owner[e] != usize::MAX {
                out.push(format!("edge {e} in clusters {} and {id}", owner[e]));
            }
            owner[e] = id;
        }
        for &v in &c.vertices {
            holders.entry(v).or_default().push(id);
            if st.is_active(v) && !c.is_boundary(v) {
                out.push(format!("active vertex {v} is interior to cluster {id}"));
            }
        }
    }
    if let Some(e) = owner.iter().position(|&o| o == usize::MAX) {
        out.push(format!("edge {e} is in no cluster of C_X"));
    }
    let mut shared: Vec<_> = holders.into_iter().filter(|(_, hs)| hs.len() > 1).collect();
    shared.sort_unstable();
    for (v, hs) in shared {
        if let Some(&id) = hs.iter().find(|&&id| !nc.clusters[id].is_boundary(v)) {
            out.push(format!("vertex {v} shared by several clusters but interior to {id}"));
        }
    }
    out
}

/// A component of `G - X` given as the X-clusters it is made of.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// `(cluster id, X-cluster index)`, sorted.
    pub xclusters: Vec<(usize, usize)>,
    pub weight: u64,
    pub size: usize,
    /// Passive boundary vertices of `C_X` inside the component, sorted.
    pub boundary: Vec<VertexId>,
}

/// Components of `G - X` that contain a passive boundary vertex of `C_X`,
/// glued from X-clusters at shared boundary vertices. Weights and sizes are
/// summed over X-clusters and corrected for vertices counted more than once.
/// Ordered by smallest boundary vertex.
pub fn decompose_active_complement(g: &Graph, st: &ActiveState, cx: &[usize]) -> Vec<Component> {
    let mut xcs: Vec<(usize, usize)> = Vec::new();
    for &id in cx {
        for i in 0..st.clusters[id].xclusters.len() {
            xcs.push((id, i));
        }
    }
    let mut parent: Vec<usize> = (0..xcs.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    // boundary vertex -> (first X-cluster seen, multiplicity)
    let mut seen: HashMap<VertexId, (usize, u32)> = HashMap::new();
    for (k, &(id, i)) in xcs.iter().enumerate() {
        for &b in &st.clusters[id].xclusters[i].boundary {
            match seen.get_mut(&b) {
                Some((first, mult)) => {
                    *mult += 1;
                    let (a, c) = (find(&mut parent, *first), find(&mut parent, k));
                    if a != c {
                        parent[a.max(c)] = a.min(c);
                    }
                }
                None => {
                    seen.insert(b, (k, 1));
                }
            }
        }
    }
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for (k, &(id, i)) in xcs.iter().enumerate() {
        let root = find(&mut parent, k);
        let at = *slot.entry(root).or_insert_with(|| {
            comps.push(Component {
                xclusters: Vec::new(),
                weight: 0,
                size: 0,
                boundary: Vec::new(),
            });
            comps.len() - 1
        });
        let xc = &st.clusters[id].xclusters[i];
        comps[at].xclusters.push((id, i));
        comps[at].weight += xc.weight;
        comps[at].size += xc.size;
    }
    for (&b, &(first, mult)) in &seen {
        let at = slot[&find(&mut parent, first)];
        let extra = u64::from(mult - 1);
        comps[at].weight -= extra * g.vertex_weight(b);
        comps[at].size -= (mult - 1) as usize;
        comps[at].boundary.push(b);
    }
    for c in &mut comps {
        c.boundary.sort_unstable();
        c.xclusters.sort_unstable();
    }
    comps.sort_by_key(|c| c.boundary[0]);
    comps
}

/// The same components computed directly by search on `G - X`, as
/// `(boundary vertices, weight, size)`.
pub fn complement_components_by_search(g: &Graph, nc: &NestedClustering, st: &ActiveState, cx: &[usize]) -> Vec<(Vec<VertexId>, u64, usize)> {
    let mut is_cx_boundary = vec![false; g.n()];
    for &id in cx {
        for &v in &nc.clusters[id].boundary {
            is_cx_boundary[v] = true;
        }
    }
    let comps = g.components_where(|v| !st.is_active(v));
    let mut out: Vec<_> = comps
        .into_iter()
        .filter_map(|c| {
            let b: Vec<VertexId> = c.iter().copied().filter(|&v| is_cx_boundary[v]).collect();
            if b.is_empty() {
                return None;
            }
            let w = c.iter().map(|&v| g.vertex_weight(v)).sum();
            Some((b, w, c.len()))
        })
        .collect();
    out.sort_by_key(|c| c.0[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{nested_r_clustering, ClusterParams};
    use crate::generators;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(g: &Graph, r: usize, h: usize) -> (NestedClustering, ClusterIndex) {
        let nc = nested_r_clustering(g, &ClusterParams::new(r, h)).unwrap().done().unwrap();
        let idx = ClusterIndex::new(g, &nc, Parallelism::Sequential);
        (nc, idx)
    }

    fn summary(comps: &[Component]) -> Vec<(Vec<VertexId>, u64, usize)> {
        comps.iter().map(|c| (c.boundary.clone(), c.weight, c.size)).collect()
    }

    #[test]
    fn empty_x_is_the_level_one_roster() {
        let g = generators::grid(8, 8);
        let (nc, idx) = setup(&g, 16, 5);
        let st = ActiveState::new(&g, &nc, &idx, 64, Parallelism::Sequential);
        let cx = st.compute_c_x(&nc);
        assert_eq!(cx, nc.roots);
        let comps = decompose_active_complement(&g, &st, &cx);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].weight, 64);
        assert_eq!(comps[0].size, 64);
    }

    #[test]
    fn path_split_at_one_vertex() {
        let g = generators::path(10);
        let (nc, idx) = setup(&g, 5, 3);
        let mut st = ActiveState::new(&g, &nc, &idx, 10, Parallelism::Sequential);
        st.set_vertex_state(&g, &nc, &idx, 5, VertexState::Active).unwrap();
        let cx = st.compute_c_x(&nc);
        assert!(check_c_x(&g, &nc, &st, &cx).is_empty());
        let comps = decompose_active_complement(&g, &st, &cx);
        let weights: Vec<u64> = comps.iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![5, 4]);
        assert_eq!(summary(&comps), complement_components_by_search(&g, &nc, &st, &cx));
    }

    #[test]
    fn fully_active_boundary_leaves_no_xcluster() {
        let g = generators::path(10);
        let (nc, idx) = setup(&g, 5, 3);
        let mut st = ActiveState::new(&g, &nc, &idx, 10, Parallelism::Sequential);
        let id = nc.clusters.iter().position(|c| c.boundary.len() == 2 && c.edges.len() > 1).unwrap();
        for &b in &nc.clusters[id].boundary.clone() {
            st.set_vertex_state(&g, &nc, &idx, b, VertexState::Active).unwrap();
        }
        assert!(st.clusters[id].xclusters.is_empty());
    }

    #[test]
    fn budget_and_cap_are_enforced() {
        let g = generators::path(10);
        let (nc, idx) = setup(&g, 5, 3);
        let mut st = ActiveState::new(&g, &nc, &idx, 1, Parallelism::Sequential);
        st.set_vertex_state(&g, &nc, &idx, 3, VertexState::Active).unwrap();
        assert!(st.set_vertex_state(&g, &nc, &idx, 4, VertexState::Active).is_err());
        st.set_vertex_state(&g, &nc, &idx, 3, VertexState::Passive).unwrap();
        assert!(st.set_vertex_state(&g, &nc, &idx, 3, VertexState::Active).is_err());
        assert!(st.set_vertex_state(&g, &nc, &idx, 4, VertexState::Passive).is_err());
    }

    #[test]
    fn random_flips_agree_with_search() {
        let g = generators::grid(12, 12);
        let (nc, idx) = setup(&g, 24, 5);
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut st = ActiveState::new(&g, &nc, &idx, g.n(), Parallelism::Sequential);
            for _ in 0..40 {
                let v = rng.gen_range(0..g.n());
                let to = if st.is_active(v) { VertexState::Passive } else { VertexState::Active };
                if st.set_vertex_state(&g, &nc, &idx, v, to).is_err() {
                    continue;
                }
                let cx = st.compute_c_x(&nc);
                assert_eq!(check_c_x(&g, &nc, &st, &cx), Vec::<String>::new());
                let comps = decompose_active_complement(&g, &st, &cx);
                assert_eq!(summary(&comps), complement_components_by_search(&g, &nc, &st, &cx));
            }
        }
    }
}
