//! Separator or clique minor for sparse graphs, driven by a nested clustering:
//! the heavy component of `G - X` is read off X-clusters, and trees and far
//! pairs are found in the union of per-cluster spanners instead of in the
//! graph itself.

use std::collections::HashMap;

use crate::active::{
    check_c_x, complement_components_by_search, decompose_active_complement, ActiveState, ClusterIndex, Component, VertexState,
};
use crate::certificates::{induced_diameter, separator_from_cut, MinorWitness, Ratio, SepOrMinor};
use crate::clustering::{nested_r_clustering, ClusterParams, Clustered, NestedClustering, DEFAULT_C_R};
use crate::ddg::{
    assemble_sx, compute_all_boundary_sets, far_threshold, spanner_k, DdgLayer, GrownTree, SxSearch, TreeOrFarPair,
};
use crate::error::{Result, SepError};
use crate::graph::{Graph, GuardPolicy, VertexId};
use crate::par::Parallelism;
use crate::shallow::{self, pad, ShallowParams};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct MinorFreeParams {
    pub h: usize,
    pub ell: usize,
    /// Spanner parameter: cluster spanners have stretch `2⌈1/ε⌉ - 1`.
    pub eps: f64,
    pub seed: u64,
    pub guard: Option<GuardPolicy>,
    pub c_r: f64,
    pub parallelism: Parallelism,
    /// Re-verify the loop invariants after every iteration.
    pub check_invariants: bool,
}

impl MinorFreeParams {
    pub fn new(h: usize, ell: usize) -> Self {
        MinorFreeParams {
            h,
            ell,
            eps: 0.5,
            seed: 0,
            guard: Some(GuardPolicy::default()),
            c_r: DEFAULT_C_R,
            parallelism: Parallelism::default(),
            check_invariants: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.h < 2 {
            return Err(SepError::InvalidParameter(format!("h must be at least 2, got {}", self.h)));
        }
        if self.ell < 1 {
            return Err(SepError::InvalidParameter("ℓ must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(SepError::InvalidParameter(format!("ε must lie in (0, 1], got {}", self.eps)));
        }
        Ok(())
    }
}

/// `r = max(2, ⌈n / (h² ℓ)⌉)`.
pub fn cluster_r(n: usize, h: usize, ell: usize) -> usize {
    n.div_ceil(h * h * ell).max(2)
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct MinorFreeStats {
    pub r: usize,
    pub clusters: usize,
    pub depth: usize,
    /// A single cluster carried 2/3 of the weight.
    pub early_exit: bool,
    /// `r` was too small for the clustering and the direct search ran instead.
    pub fallback: bool,
    pub iterations: usize,
    pub trees: usize,
    pub cuts: usize,
    pub dropped_branch_sets: usize,
    pub max_tree_depth: usize,
    pub max_x: usize,
    pub ddg_builds: usize,
    pub spanner_builds: usize,
    pub invariant_checks: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct MinorFreeOutcome {
    pub result: SepOrMinor,
    pub stats: MinorFreeStats,
    pub branch_sets: Vec<Vec<VertexId>>,
}

#[derive(Clone, Copy, Debug)]
pub struct MinorFreeBounds {
    pub pad_layers: usize,
    pub pad_target: usize,
    pub max_tree_depth: usize,
    pub max_branch_size: usize,
    /// Cap on `|X|` handed to the active state.
    pub x_cap: usize,
    pub separator: u64,
}

impl MinorFreeBounds {
    /// `max_cluster` bounds the extension of a tree inside one cluster.
    pub fn new(n: usize, h: usize, ell: usize, k: usize, max_cluster: usize) -> Self {
        let ln_n = (n.max(2) as f64).ln();
        let pad_layers = ((ell as f64 * ln_n).ceil() as usize).max(1);
        let pad_target = ((h as f64 * ell as f64 * ln_n).ceil() as usize).max(1);
        let max_tree_depth = far_threshold(ell, n, k).ceil() as usize + max_cluster;
        let max_branch_size = ((h - 1) * max_tree_depth + 1).max(pad_target);
        let b = n.div_ceil(ell);
        MinorFreeBounds {
            pad_layers,
            pad_target,
            max_tree_depth,
            max_branch_size,
            x_cap: b + h * max_branch_size,
            separator: (b + (h - 1) * max_branch_size) as u64,
        }
    }
}

/// Set found by the two-sided ball growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    /// Start of the search that stopped first.
    pub from: VertexId,
    /// `S = N(R)`, sorted.
    pub s: Vec<VertexId>,
    pub rounds: usize,
    /// Vertices scanned by both searches together.
    pub work: usize,
}

struct Ball {
    dist: HashMap<VertexId, usize>,
    order: Vec<VertexId>,
    head: usize,
    radius: usize,
    size: usize,
    rounds: usize,
}

impl Ball {
    fn new(s: VertexId) -> Self {
        Ball {
            dist: HashMap::from([(s, 0)]),
            order: vec![s],
            head: 0,
            radius: 0,
            size: 1,
            rounds: 0,
        }
    }

    /// One unit of work: scan one vertex, or close a round. Returns true once
    /// the ball stops growing by a factor `1 + 1/ℓ`.
    fn step(&mut self, g: &Graph, alive: &impl Fn(VertexId) -> bool, ell: usize, other: &HashMap<VertexId, usize>) -> Result<bool> {
        let target = self.radius + 2;
        if let Some(&u) = self.order.get(self.head) {
            let du = self.dist[&u];
            if du < target {
                self.head += 1;
                for &v in g.neighbors(u) {
                    if !alive(v) || self.dist.contains_key(&v) {
                        continue;
                    }
                    if other.contains_key(&v) {
                        return Err(SepError::Internal(format!("ball searches met at vertex {v}")));
                    }
                    self.dist.insert(v, du + 1);
                    self.order.push(v);
                }
                return Ok(false);
            }
        }
        let next = self.order.partition_point(|v| self.dist[v] <= target);
        if (ell as u128) * next as u128 >= (ell as u128 + 1) * self.size as u128 {
            self.size = next;
            self.radius = target;
            self.rounds += 1;
            return Ok(false);
        }
        Ok(true)
    }

    /// Everything within one step of the grown ball.
    fn neighborhood(&self) -> Vec<VertexId> {
        let mut s: Vec<VertexId> = self.order.iter().copied().filter(|v| self.dist[v] <= self.radius + 1).collect();
        s.sort_unstable();
        s
    }
}

/// Grows balls around `s` and `t` in the subgraph on `alive`, alternating one
/// unit of work at a time with `s` first, each by distance-2 rounds while it
/// grows by a factor `1 + 1/ℓ`. The first ball to stall yields
/// `S = N(R)`. Fails if the balls meet, which the distance between `s` and
/// `t` is meant to rule out.
pub fn bidirectional_cut(g: &Graph, alive: impl Fn(VertexId) -> bool, s: VertexId, t: VertexId, ell: usize) -> Result<CutSet> {
    if ell == 0 {
        return Err(SepError::InvalidParameter("ℓ must be positive".into()));
    }
    if s == t || !alive(s) || !alive(t) {
        return Err(SepError::Contract(format!("ball search needs two distinct live vertices, got {s} and {t}")));
    }
    let mut a = Ball::new(s);
    let mut b = Ball::new(t);
    let winner = loop {
        if a.step(g, &alive, ell, &b.dist)? {
            break (&a, s);
        }
        if b.step(g, &alive, ell, &a.dist)? {
            break (&b, t);
        }
    };
    let (ball, from) = winner;
    Ok(CutSet {
        from,
        s: ball.neighborhood(),
        rounds: ball.rounds,
        work: a.head + b.head,
    })
}

/// `(|N(S) ∩ U \ S|, |N(U \ S) ∩ S|)` in the subgraph on `alive`, scanning
/// only `S`.
pub fn cut_frontiers(g: &Graph, alive: impl Fn(VertexId) -> bool, s: &[VertexId]) -> (usize, usize) {
    let mut in_s = HashMap::with_capacity(s.len());
    for &v in s {
        in_s.insert(v, ());
    }
    let mut outer: Vec<VertexId> = Vec::new();
    let mut inner = 0;
    for &u in s {
        let mut touches = false;
        for &v in g.neighbors(u) {
            if alive(v) && !in_s.contains_key(&v) {
                outer.push(v);
                touches = true;
            }
        }
        inner += usize::from(touches);
    }
    outer.sort_unstable();
    outer.dedup();
    (outer.len(), inner)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TsOutcome {
    EmptyIndex(usize),
    Tree(GrownTree),
    CutSet(CutSet),
}

fn heavy(w: u64, total: u64) -> bool {
    3 * w as u128 > 2 * total as u128
}

/// Loop state: `X = M ∪ B` is exactly the active set; `V_r` is every passive
/// vertex outside the heavy component `V'`.
struct Run<'a> {
    g: &'a Graph,
    params: &'a MinorFreeParams,
    nc: NestedClustering,
    index: ClusterIndex,
    st: ActiveState,
    layer: DdgLayer,
    bounds: MinorFreeBounds,
    total: u64,
    branch: Vec<Vec<VertexId>>,
    branch_depth: Vec<u64>,
    branch_of: Vec<u32>,
    minor_weight: u64,
    boundary_len: usize,
    boundary_weight: u64,
    stats: MinorFreeStats,
}

impl Run<'_> {
    fn activate(&mut self, v: VertexId) -> Result<()> {
        self.st.set_vertex_state(self.g, &self.nc, &self.index, v, VertexState::Active).map(|_| ())
    }

    fn reindex_branches(&mut self) {
        self.branch_of.iter_mut().for_each(|b| *b = NONE);
        for (i, set) in self.branch.iter().enumerate() {
            for &v in set {
                self.branch_of[v] = i as u32;
            }
        }
    }

    fn minor_len(&self) -> usize {
        self.branch.iter().map(Vec::len).sum()
    }

    fn tree_or_cut_step(&mut self, cx: &[usize], comp: &Component) -> Result<TsOutcome> {
        let g = self.g;
        let ell = self.params.ell;
        let mode = self.params.parallelism;
        self.layer.refresh(&self.nc, &self.index, &self.st, cx, mode);
        let sx = assemble_sx(&self.nc, &self.st, &self.layer, cx)?;
        let mut cands: Vec<usize> = self
            .branch
            .iter()
            .flatten()
            .flat_map(|&v| self.index.boundary_of[v].iter().map(|&c| c as usize))
            .filter(|c| cx.binary_search(c).is_ok())
            .collect();
        cands.sort_unstable();
        cands.dedup();
        let p = self.branch.len();
        let labels = compute_all_boundary_sets(&self.nc, &self.index, &self.st, &cands, &self.branch_of, p, mode);
        let s = comp.boundary[0];
        let search = SxSearch {
            g,
            nc: &self.nc,
            index: &self.index,
            st: &self.st,
            layer: &self.layer,
            sx: &sx,
        };
        Ok(match search.find_tree_or_far_pair(&labels, &self.branch_of, p, s, ell)? {
            TreeOrFarPair::EmptyIndex(i) => TsOutcome::EmptyIndex(i),
            TreeOrFarPair::Tree(t) => TsOutcome::Tree(t),
            TreeOrFarPair::FarPair { s, t, .. } => {
                if self.params.check_invariants {
                    let st = &self.st;
                    let d = g.bfs_distances(s, |v| !st.is_active(v))[t];
                    let need = 8.0 * ell as f64 * (g.n().max(2) as f64).ln();
                    if (d as f64) < need {
                        self.fail(format!("far pair {s}-{t} at distance {d} < {need:.1}"));
                    }
                }
                let st = &self.st;
                TsOutcome::CutSet(bidirectional_cut(g, |v| !st.is_active(v), s, t, ell)?)
            }
        })
    }

    fn fail(&mut self, msg: String) {
        let it = self.stats.iterations;
        self.stats.violations.push(format!("iteration {it}: {msg}"));
    }

    fn apply_tree(&mut self, t: GrownTree, comp: &Component) -> Result<()> {
        let h = self.params.h;
        if self.params.check_invariants {
            let size_bound = self.branch.len() * self.bounds.max_tree_depth + 1;
            if t.depth > self.bounds.max_tree_depth || t.vertices.len() > size_bound {
                self.fail(format!("tree depth {} / size {} over bound", t.depth, t.vertices.len()));
            }
        }
        self.stats.max_tree_depth = self.stats.max_tree_depth.max(t.depth);
        let target = self.bounds.pad_target.min((comp.size / h).max(1));
        let st = &self.st;
        let (set, layers) = pad(self.g, |v| !st.is_active(v), &t.vertices, target, self.bounds.pad_layers);
        for &v in &set {
            self.activate(v)?;
            self.minor_weight += self.g.vertex_weight(v);
        }
        self.branch.push(set);
        self.branch_depth.push(2 * (t.depth + layers) as u64);
        self.reindex_branches();
        self.stats.trees += 1;
        Ok(())
    }

    fn apply_cut(&mut self, cut: CutSet, comp: &Component) -> Result<()> {
        let g = self.g;
        let st = &self.st;
        let alive = |v: VertexId| !st.is_active(v);
        if self.params.check_invariants {
            let (a, b) = cut_frontiers(g, alive, &cut.s);
            let min = cut.s.len().min(comp.size - cut.s.len());
            if self.params.ell * a > min || self.params.ell * b > min {
                self.fail(format!("cut frontiers ({a}, {b}) exceed min(|S|, |V' - S|)/ℓ with min = {min}"));
            }
        }
        let st = &self.st;
        let w_s: u64 = cut.s.iter().map(|&v| g.vertex_weight(v)).sum();
        let w_rest = comp.weight - w_s;
        let take_s = (w_s, cut.s.len()) <= (w_rest, comp.size - cut.s.len());
        let mut in_s: HashMap<VertexId, ()> = HashMap::with_capacity(cut.s.len());
        for &v in &cut.s {
            in_s.insert(v, ());
        }
        let mut boundary: Vec<VertexId> = if take_s {
            cut.s.iter().flat_map(|&u| g.neighbors(u)).copied().filter(|&v| !st.is_active(v) && !in_s.contains_key(&v)).collect()
        } else {
            cut.s
                .iter()
                .copied()
                .filter(|&u| g.neighbors(u).iter().any(|&v| !st.is_active(v) && !in_s.contains_key(&v)))
                .collect()
        };
        boundary.sort_unstable();
        boundary.dedup();
        for &v in &boundary {
            self.activate(v)?;
            self.boundary_weight += g.vertex_weight(v);
        }
        self.boundary_len += boundary.len();
        self.stats.cuts += 1;
        Ok(())
    }

    fn drop_branch(&mut self, i: usize) -> Result<()> {
        let set = self.branch.remove(i);
        self.branch_depth.remove(i);
        for &v in &set {
            self.st.set_vertex_state(self.g, &self.nc, &self.index, v, VertexState::Passive)?;
            self.minor_weight -= self.g.vertex_weight(v);
        }
        self.reindex_branches();
        self.stats.dropped_branch_sets += 1;
        Ok(())
    }

    fn check(&mut self, cx: &[usize], comps: &[Component], heavy_comp: Option<&Component>) {
        self.stats.invariant_checks += 1;
        let g = self.g;
        let mut out = check_c_x(g, &self.nc, &self.st, cx);
        let mut fast: Vec<(u64, usize)> = comps.iter().map(|c| (c.weight, c.size)).collect();
        let mut slow: Vec<(u64, usize)> = complement_components_by_search(g, &self.nc, &self.st, cx).iter().map(|c| (c.1, c.2)).collect();
        fast.sort_unstable();
        slow.sort_unstable();
        if fast != slow {
            out.push(format!("decomposition {fast:?} differs from search {slow:?}"));
        }
        if self.branch.len() > self.params.h {
            out.push(format!("{} branch sets exceed h", self.branch.len()));
        }
        for (i, set) in self.branch.iter().enumerate() {
            if set.len() > self.bounds.max_branch_size {
                out.push(format!("branch set {i} has {} vertices > {}", set.len(), self.bounds.max_branch_size));
            }
            match induced_diameter(g, set) {
                None => out.push(format!("branch set {i} is disconnected")),
                Some(d) if d as u64 > self.branch_depth[i] => out.push(format!("branch set {i} has diameter {d} > {}", self.branch_depth[i])),
                _ => {}
            }
        }
        if MinorWitness::from_branch_sets(g, self.branch.clone(), None).is_none() {
            out.push("some pair of branch sets is not adjacent".into());
        }
        if self.st.x_len() != self.minor_len() + self.boundary_len {
            out.push(format!("|X| = {} but |M| + |B| = {}", self.st.x_len(), self.minor_len() + self.boundary_len));
        }
        if let Some(c) = heavy_comp {
            let n = g.n();
            let rest_len = n - self.minor_len() - self.boundary_len - c.size;
            let rest_w = self.total - self.minor_weight - self.boundary_weight - c.weight;
            if self.params.ell * self.boundary_len > rest_len {
                out.push(format!("|B| = {} exceeds |V_r|/ℓ = {rest_len}/{}", self.boundary_len, self.params.ell));
            }
            if 3 * rest_w as u128 > 2 * self.total as u128 {
                out.push(format!("w(V_r) = {rest_w} exceeds 2/3 of {}", self.total));
            }
            // V' is closed in G - X, so no edge joins it to V_r
            let st = &self.st;
            let dist = g.bfs_distances(c.boundary[0], |v| !st.is_active(v));
            let members: Vec<VertexId> = (0..n).filter(|&v| dist[v] != usize::MAX).collect();
            let w: u64 = members.iter().map(|&v| g.vertex_weight(v)).sum();
            if (w, members.len()) != (c.weight, c.size) {
                out.push(format!("V' by search has weight/size ({w}, {}) vs ({}, {})", members.len(), c.weight, c.size));
            }
        }
        for msg in out {
            self.fail(msg);
        }
    }
}

pub fn minor_free_separator(g: &Graph, params: &MinorFreeParams) -> Result<MinorFreeOutcome> {
    params.validate()?;
    let (h, ell) = (params.h, params.ell);
    let n = g.n();
    let r = cluster_r(n, h, ell);
    let mut cp = ClusterParams::new(r, h);
    cp.eps = params.eps;
    cp.seed = params.seed;
    cp.c_r = params.c_r;
    cp.guard = params.guard;
    cp.parallelism = params.parallelism;
    let mut stats = MinorFreeStats {
        r,
        ..MinorFreeStats::default()
    };
    if n == 0 || (r as f64) <= cp.r_floor(n) {
        let mut sp = ShallowParams::new(h, ell);
        sp.seed = params.seed;
        sp.guard = params.guard;
        sp.check_invariants = params.check_invariants;
        let out = shallow::shallow_separator(g, &sp)?;
        stats.fallback = true;
        stats.iterations = out.stats.iterations;
        stats.trees = out.stats.trees;
        stats.cuts = out.stats.cuts;
        stats.dropped_branch_sets = out.stats.dropped_branch_sets;
        stats.max_tree_depth = out.stats.max_tree_depth;
        stats.invariant_checks = out.stats.invariant_checks;
        stats.violations = out.stats.violations;
        return Ok(MinorFreeOutcome {
            result: out.result,
            stats,
            branch_sets: out.branch_sets,
        });
    }
    let nc = match nested_r_clustering(g, &cp)? {
        Clustered::Done(nc) => nc,
        Clustered::Minor(m) => {
            return Ok(MinorFreeOutcome {
                result: m,
                stats,
                branch_sets: Vec::new(),
            })
        }
    };
    stats.clusters = nc.clusters.len();
    stats.depth = nc.depth();
    let total = g.total_vertex_weight();
    let k = spanner_k(params.eps);
    let max_cluster = nc.clusters.iter().map(|c| c.vertices.len()).max().unwrap_or(0);
    let bounds = MinorFreeBounds::new(n, h, ell, k, max_cluster);

    if total > 0 {
        let early = nc
            .clusters
            .iter()
            .filter(|c| 3 * c.weight(g) as u128 >= 2 * total as u128)
            .min_by_key(|c| (c.vertices.len(), c.id));
        if let Some(c) = early {
            stats.early_exit = true;
            let bound = bounds.separator.max(c.vertices.len() as u64);
            return Ok(MinorFreeOutcome {
                result: SepOrMinor::Separator(separator_from_cut(g, &c.vertices, Ratio::TWO_THIRDS, bound)?),
                stats,
                branch_sets: Vec::new(),
            });
        }
    }

    let index = ClusterIndex::new(g, &nc, params.parallelism);
    let st = ActiveState::new(g, &nc, &index, bounds.x_cap, params.parallelism);
    let layer = DdgLayer::new(&nc, params.eps, params.seed);
    let mut run = Run {
        g,
        params,
        nc,
        index,
        st,
        layer,
        bounds,
        total,
        branch: Vec::new(),
        branch_depth: Vec::new(),
        branch_of: vec![NONE; n],
        minor_weight: 0,
        boundary_len: 0,
        boundary_weight: 0,
        stats,
    };
    let limit = 4 * n + 4;
    while run.branch.len() < h {
        let cx = run.st.compute_c_x(&run.nc);
        let comps = decompose_active_complement(g, &run.st, &cx);
        let heavy_comp = comps.iter().find(|c| heavy(c.weight, total)).cloned();
        if params.check_invariants {
            run.check(&cx, &comps, heavy_comp.as_ref());
        }
        let Some(comp) = heavy_comp else { break };
        run.stats.iterations += 1;
        if run.stats.iterations > limit {
            return Err(SepError::Internal("separator loop made no progress".into()));
        }
        match run.tree_or_cut_step(&cx, &comp)? {
            TsOutcome::EmptyIndex(i) => run.drop_branch(i)?,
            TsOutcome::Tree(t) => run.apply_tree(t, &comp)?,
            TsOutcome::CutSet(c) => run.apply_cut(c, &comp)?,
        }
    }
    run.stats.max_x = run.st.max_x;
    run.stats.ddg_builds = run.layer.ddg_builds;
    run.stats.spanner_builds = run.layer.spanner_builds;

    let result = if run.branch.len() == h {
        let depth = run.branch_depth.iter().copied().max().unwrap_or(0);
        let w = MinorWitness::from_branch_sets(g, run.branch.clone(), Some(depth))
            .ok_or_else(|| SepError::Internal("branch sets lost pairwise adjacency".into()))?;
        SepOrMinor::MinorWitness(w)
    } else {
        let cut: Vec<VertexId> = (0..n).filter(|&v| run.st.is_active(v)).collect();
        SepOrMinor::Separator(separator_from_cut(g, &cut, Ratio::TWO_THIRDS, run.bounds.separator)?)
    };
    Ok(MinorFreeOutcome {
        result,
        stats: run.stats,
        branch_sets: run.branch,
    })
}

/// `ℓ = max(1, ⌈√n / (h √ln n)⌉)`, giving a separator of size
/// `O(h √(n log n))`.
pub fn balanced_minor_free_ell(n: usize, h: usize) -> usize {
    if n < 3 {
        return 1;
    }
    let nf = n as f64;
    (nf.sqrt() / (h as f64 * nf.ln().sqrt())).ceil().max(1.0) as usize
}

pub fn balanced_separator(g: &Graph, h: usize, eps: f64, seed: u64) -> Result<MinorFreeOutcome> {
    let mut p = MinorFreeParams::new(h, balanced_minor_free_ell(g.n(), h));
    p.eps = eps;
    p.seed = seed;
    minor_free_separator(g, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::verify;
    use crate::generators;
    use crate::graph::GraphBuilder;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn checked(g: &Graph, h: usize, ell: usize) -> MinorFreeOutcome {
        let mut p = MinorFreeParams::new(h, ell);
        p.check_invariants = true;
        let out = minor_free_separator(g, &p).unwrap();
        assert!(verify(g, &out.result, h).ok, "{:?}", verify(g, &out.result, h));
        assert!(out.stats.violations.is_empty(), "{:?}", out.stats.violations);
        out
    }

    fn frontier_ok(g: &Graph, s: &[VertexId], ell: usize) -> bool {
        let (a, b) = cut_frontiers(g, |_| true, s);
        let min = s.len().min(g.n() - s.len());
        ell * a <= min && ell * b <= min
    }

    #[test]
    fn cut_on_a_long_path() {
        let g = generators::path(10_000);
        let c = bidirectional_cut(&g, |_| true, 0, 9_999, 4).unwrap();
        assert_eq!(c.from, 0);
        assert!(c.s.contains(&0) && !c.s.contains(&9_999));
        assert!(frontier_ok(&g, &c.s, 4));
        assert!(c.work < 2 * c.s.len() + 4);
    }

    #[test]
    fn cut_between_two_cliques_lands_on_the_path() {
        let (k, len) = (20, 400);
        let mut b = GraphBuilder::new(2 * k + len);
        for base in [0, k + len] {
            for i in 0..k {
                for j in i + 1..k {
                    b.add_edge(base + i, base + j).unwrap();
                }
            }
        }
        // path k .. k+len-1 joins vertex k-1 to vertex k+len
        for v in k - 1..k + len {
            b.add_edge(v, v + 1).unwrap();
        }
        let g = b.build().unwrap();
        let c = bidirectional_cut(&g, |_| true, 0, k + len + 1, 4).unwrap();
        assert!(frontier_ok(&g, &c.s, 4));
        let (outer, _) = cut_frontiers(&g, |_| true, &c.s);
        assert_eq!(outer, 1);
        let frontier: Vec<VertexId> = c.s.iter().copied().filter(|&u| g.neighbors(u).iter().any(|v| !c.s.contains(v))).collect();
        assert!(frontier.iter().all(|&v| (k..k + len).contains(&v)), "{frontier:?}");
    }

    #[test]
    fn meeting_balls_are_an_error() {
        let g = generators::path(10);
        assert!(matches!(bidirectional_cut(&g, |_| true, 0, 3, 4), Err(SepError::Internal(_))));
        assert!(bidirectional_cut(&g, |_| true, 2, 2, 4).is_err());
    }

    #[test]
    fn grid_separator_verifies() {
        let g = generators::grid(32, 32);
        let out = checked(&g, 5, balanced_minor_free_ell(1024, 5));
        assert!(matches!(out.result, SepOrMinor::Separator(_)));
        assert!(out.stats.trees > 0);
    }

    #[test]
    fn shuffled_cycle_takes_cuts() {
        let n = 5000;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (perm[i], perm[(i + 1) % n])).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let out = checked(&g, 3, 1);
        assert!(out.stats.cuts > 0);
    }

    #[test]
    fn complete_graph_yields_a_separator() {
        let g = generators::complete(4);
        let out = checked(&g, 4, 1);
        assert!(matches!(out.result, SepOrMinor::Separator(_)));
    }

    #[test]
    fn heavy_vertex_exits_early() {
        let g = generators::grid(16, 16);
        let mut w = vec![1; 256];
        w[100] = 10_000;
        let g = g.with_vertex_weights(w).unwrap();
        let out = checked(&g, 5, 1);
        assert!(!out.stats.fallback && out.stats.early_exit);
        let SepOrMinor::Separator(s) = &out.result else { panic!("expected a separator") };
        assert!(s.separator.contains(&100));
    }

    #[test]
    fn grid_with_small_h_gives_a_minor() {
        let g = generators::grid(24, 24);
        let out = checked(&g, 3, 2);
        assert!(matches!(out.result, SepOrMinor::DensityCertificate(_)));
        let mut p = MinorFreeParams::new(3, 2);
        p.guard = None;
        let out = minor_free_separator(&g, &p).unwrap();
        assert!(matches!(out.result, SepOrMinor::MinorWitness(_)));
        assert!(verify(&g, &out.result, 3).ok);
    }

    #[test]
    fn tiny_graphs() {
        let g = generators::path(2);
        let out = checked(&g, 3, 1);
        assert!(matches!(out.result, SepOrMinor::Separator(_)));
        let g = Graph::empty(0);
        checked(&g, 3, 1);
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = generators::grid(24, 24);
        let mut p = MinorFreeParams::new(5, 2);
        p.parallelism = Parallelism::Sequential;
        let a = minor_free_separator(&g, &p).unwrap();
        p.parallelism = Parallelism::Rayon;
        let b = minor_free_separator(&g, &p).unwrap();
        assert_eq!(a.result, b.result);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = generators::path(5);
        assert!(minor_free_separator(&g, &MinorFreeParams::new(1, 1)).is_err());
        assert!(minor_free_separator(&g, &MinorFreeParams::new(3, 0)).is_err());
    }
}
