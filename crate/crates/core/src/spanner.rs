//! Sparse (2k-1)-spanners: a randomized clustering construction and a
//! decremental wrapper that keeps the stretch guarantee under deletions.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SepError};
use crate::graph::{Adjacency, EdgeId, Graph, VertexId};
use crate::paths::{dijkstra, INF};

/// Constant in the size bound `|E(S)| <= SIZE_CONSTANT * k * n^(1 + 1/k)`.
pub const SIZE_CONSTANT: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanner {
    pub k: usize,
    /// Host edge ids, sorted.
    pub edges: Vec<EdgeId>,
}

impl Spanner {
    pub fn stretch(&self) -> u64 {
        2 * self.k as u64 - 1
    }

    pub fn size_bound(k: usize, n: usize) -> f64 {
        SIZE_CONSTANT * k as f64 * (n.max(1) as f64).powf(1.0 + 1.0 / k as f64)
    }

    pub fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &e in &self.edges {
            mask[e] = true;
        }
        mask
    }
}

pub fn build_spanner(g: &Graph, k: usize, seed: u64) -> Spanner {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alive = vec![true; g.m()];
    Spanner {
        k,
        edges: spanner_edges(g, &alive, k, &mut rng),
    }
}

const NONE: usize = usize::MAX;

/// Clustering construction restricted to the edges marked in `alive`.
/// Ties between equal weights go to the smaller edge id.
pub fn spanner_edges(g: &Graph, alive: &[bool], k: usize, rng: &mut ChaCha8Rng) -> Vec<EdgeId> {
    assert!(k >= 1, "stretch parameter k must be positive");
    let n = g.n();
    let mut live = alive.to_vec();
    let mut chosen = vec![false; g.m()];
    let active = (0..n).filter(|&v| g.incident(v).any(|(_, e)| live[e])).count().max(1);
    let p = (active as f64).powf(-1.0 / k as f64);
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut groups: Vec<(usize, u64, EdgeId)> = Vec::new();

    for _ in 1..k {
        let mut centers: Vec<usize> = cluster.iter().copied().filter(|&c| c != NONE).collect();
        centers.sort_unstable();
        centers.dedup();
        let mut sampled = vec![false; n];
        for &c in &centers {
            sampled[c] = rng.gen_bool(p);
        }
        let mut next = cluster.clone();
        let mut removals: Vec<EdgeId> = Vec::new();
        for v in 0..n {
            let cv = cluster[v];
            if cv == NONE || sampled[cv] {
                continue;
            }
            groups.clear();
            for (u, e) in g.incident(v) {
                if live[e] && cluster[u] != NONE && cluster[u] != cv {
                    groups.push((cluster[u], g.edge_weight(e), e));
                }
            }
            if groups.is_empty() {
                next[v] = NONE;
                continue;
            }
            groups.sort_unstable();
            // lightest edge per adjacent cluster
            let mut lightest: Vec<(usize, (u64, EdgeId))> = Vec::new();
            for &(c, w, e) in groups.iter() {
                if lightest.last().is_none_or(|&(lc, _)| lc != c) {
                    lightest.push((c, (w, e)));
                }
            }
            let best_sampled = lightest.iter().filter(|(c, _)| sampled[*c]).min_by_key(|(_, k)| *k).copied();
            let drop_cluster = |c: usize, removals: &mut Vec<EdgeId>| {
                for &(c2, _, e) in groups.iter() {
                    if c2 == c {
                        removals.push(e);
                    }
                }
            };
            match best_sampled {
                Some((cs, ks)) => {
                    chosen[ks.1] = true;
                    next[v] = cs;
                    drop_cluster(cs, &mut removals);
                    for &(c, kc) in &lightest {
                        if c != cs && kc < ks {
                            chosen[kc.1] = true;
                            drop_cluster(c, &mut removals);
                        }
                    }
                }
                None => {
                    for &(c, kc) in &lightest {
                        chosen[kc.1] = true;
                        drop_cluster(c, &mut removals);
                    }
                    next[v] = NONE;
                }
            }
        }
        for e in removals {
            live[e] = false;
        }
        cluster = next;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if live[e] && (cluster[u] == NONE || cluster[v] == NONE || cluster[u] == cluster[v]) {
                live[e] = false;
            }
        }
    }

    // final phase: every vertex keeps its lightest edge into each adjacent cluster
    for v in 0..n {
        groups.clear();
        for (u, e) in g.incident(v) {
            if live[e] && cluster[u] != NONE && cluster[u] != cluster[v] {
                groups.push((cluster[u], g.edge_weight(e), e));
            }
        }
        groups.sort_unstable();
        let mut last = NONE;
        for &(c, _, e) in groups.iter() {
            if c != last {
                chosen[e] = true;
                last = c;
            }
        }
    }
    (0..g.m()).filter(|&e| chosen[e] && alive[e]).collect()
}

/// Result of comparing spanner distances with host distances.
#[derive(Clone, Debug, PartialEq)]
pub struct StretchReport {
    pub max_ratio: f64,
    /// Pairs connected in the host but not in the spanner.
    pub disconnected: usize,
    pub pairs_checked: usize,
}

#[derive(Clone, Debug)]
pub enum PairSample {
    All,
    Random { count: usize, seed: u64 },
    List(Vec<(VertexId, VertexId)>),
}

pub fn stretch_check(g: &Graph, span: &Spanner, sample: &PairSample) -> StretchReport {
    let in_span = span.mask(g.m());
    let sources: Vec<(VertexId, Vec<VertexId>)> = match sample {
        PairSample::All => (0..g.n()).map(|s| (s, (s + 1..g.n()).collect())).collect(),
        PairSample::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut by_source: std::collections::BTreeMap<VertexId, Vec<VertexId>> = Default::default();
            if g.n() > 0 {
                for _ in 0..*count {
                    let u = rng.gen_range(0..g.n());
                    let v = rng.gen_range(0..g.n());
                    by_source.entry(u).or_default().push(v);
                }
            }
            by_source.into_iter().collect()
        }
        PairSample::List(pairs) => {
            let mut by_source: std::collections::BTreeMap<VertexId, Vec<VertexId>> = Default::default();
            for &(u, v) in pairs {
                by_source.entry(u).or_default().push(v);
            }
            by_source.into_iter().collect()
        }
    };
    let mut rep = StretchReport {
        max_ratio: 1.0,
        disconnected: 0,
        pairs_checked: 0,
    };
    for (s, targets) in sources {
        let dg = dijkstra(g, s, |_| true);
        let ds = dijkstra(g, s, |e| in_span[e]);
        for t in targets {
            rep.pairs_checked += 1;
            if dg[t] == INF {
                continue;
            }
            if ds[t] == INF {
                rep.disconnected += 1;
                rep.max_ratio = f64::INFINITY;
            } else if dg[t] > 0 {
                rep.max_ratio = rep.max_ratio.max(ds[t] as f64 / dg[t] as f64);
            } else if ds[t] > 0 {
                rep.max_ratio = f64::INFINITY;
            }
        }
    }
    rep
}

/// A spanner of a shrinking subgraph of `host`.
///
/// After a build, every surviving non-spanner edge `uv` stores a witness path
/// in the spanner of length at most `(2k-1) w(uv)`. Deleting a spanner edge
/// promotes the surviving edges whose witness used it into the spanner, so the
/// stretch bound holds after every operation. Once the number of deletions
/// since the last build exceeds `max(sqrt(n), m/4)` the spanner is rebuilt
/// from the surviving edges.
#[derive(Clone, Debug)]
pub struct DecrementalSpanner<'g> {
    host: &'g Graph,
    k: usize,
    rng: ChaCha8Rng,
    alive: Vec<bool>,
    alive_m: usize,
    in_span: Vec<bool>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    dependents: Vec<Vec<EdgeId>>,
    deleted_since_rebuild: usize,
    rebuild_budget: usize,
    pub rebuilds: usize,
    pub promotions: usize,
}

impl<'g> DecrementalSpanner<'g> {
    pub fn new(host: &'g Graph, k: usize, seed: u64) -> Self {
        Self::with_edges(host, k, seed, vec![true; host.m()])
    }

    /// Starts from the subgraph of `host` given by the edge mask `alive`.
    pub fn with_edges(host: &'g Graph, k: usize, seed: u64, alive: Vec<bool>) -> Self {
        let alive_m = alive.iter().filter(|&&a| a).count();
        let mut s = DecrementalSpanner {
            host,
            k,
            rng: ChaCha8Rng::seed_from_u64(seed),
            alive,
            alive_m,
            in_span: vec![false; host.m()],
            adj: vec![Vec::new(); host.n()],
            dependents: vec![Vec::new(); host.m()],
            deleted_since_rebuild: 0,
            rebuild_budget: 0,
            rebuilds: 0,
            promotions: 0,
        };
        s.rebuild();
        s.rebuilds = 0;
        s
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stretch(&self) -> u64 {
        2 * self.k as u64 - 1
    }

    pub fn rebuild_budget(&self) -> usize {
        self.rebuild_budget
    }

    pub fn is_alive(&self, e: EdgeId) -> bool {
        self.alive[e]
    }

    pub fn alive_edges(&self) -> usize {
        self.alive_m
    }

    pub fn in_spanner(&self, e: EdgeId) -> bool {
        self.in_span[e]
    }

    pub fn spanner(&self) -> Spanner {
        Spanner {
            k: self.k,
            edges: (0..self.host.m()).filter(|&e| self.in_span[e]).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.in_span.iter().filter(|&&b| b).count()
    }

    /// Calls `f` on every spanner neighbor of `v`.
    #[inline]
    pub fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId)) {
        for &(u, e) in &self.adj[v] {
            if self.in_span[e] {
                f(u);
            }
        }
    }

    fn rebuild(&mut self) {
        let host = self.host;
        let edges = spanner_edges(host, &self.alive, self.k, &mut self.rng);
        self.in_span.iter_mut().for_each(|b| *b = false);
        for &e in &edges {
            self.in_span[e] = true;
        }
        for list in &mut self.adj {
            list.clear();
        }
        for &e in &edges {
            let (u, v) = host.edge(e);
            self.adj[u].push((v, e));
            self.adj[v].push((u, e));
        }
        for d in &mut self.dependents {
            d.clear();
        }
        let limit = self.stretch();
        for e in 0..host.m() {
            if !self.alive[e] || self.in_span[e] {
                continue;
            }
            let (u, v) = host.edge(e);
            let budget = limit.saturating_mul(host.edge_weight(e));
            match self.witness_path(u, v, budget) {
                Some(path) => {
                    for f in path {
                        self.dependents[f].push(e);
                    }
                }
                None => self.promote(e),
            }
        }
        let active = (0..host.n()).filter(|&v| !self.adj[v].is_empty()).count();
        self.rebuild_budget = ((active as f64).sqrt().ceil() as usize).max(self.alive_m / 4).max(1);
        self.deleted_since_rebuild = 0;
        self.rebuilds += 1;
    }

    fn promote(&mut self, e: EdgeId) {
        let (u, v) = self.host.edge(e);
        self.in_span[e] = true;
        self.adj[u].push((v, e));
        self.adj[v].push((u, e));
        self.promotions += 1;
    }

    /// Spanner path from `u` to `v` of weight at most `budget`, as edge ids.
    fn witness_path(&self, u: VertexId, v: VertexId, budget: u64) -> Option<Vec<EdgeId>> {
        let host = self.host;
        if host.has_unit_edge_weights() {
            // bounded BFS
            let mut seen: std::collections::HashMap<VertexId, (VertexId, EdgeId, u64)> = Default::default();
            let mut q = VecDeque::new();
            seen.insert(u, (u, usize::MAX, 0));
            q.push_back(u);
            while let Some(x) = q.pop_front() {
                let d = seen[&x].2;
                if x == v {
                    break;
                }
                if d >= budget {
                    continue;
                }
                for &(y, e) in &self.adj[x] {
                    if self.in_span[e] && !seen.contains_key(&y) {
                        seen.insert(y, (x, e, d + 1));
                        q.push_back(y);
                    }
                }
            }
            let mut path = Vec::new();
            let mut x = v;
            seen.get(&v)?;
            while x != u {
                let (p, e, _) = seen[&x];
                path.push(e);
                x = p;
            }
            return Some(path);
        }
        use std::cmp::Reverse;
        let mut dist: std::collections::HashMap<VertexId, (u64, VertexId, EdgeId)> = Default::default();
        let mut heap = std::collections::BinaryHeap::new();
        dist.insert(u, (0, u, usize::MAX));
        heap.push(Reverse((0u64, u)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if d > dist[&x].0 {
                continue;
            }
            if x == v {
                break;
            }
            for &(y, e) in &self.adj[x] {
                if !self.in_span[e] {
                    continue;
                }
                let nd = d.saturating_add(host.edge_weight(e));
                if nd <= budget && dist.get(&y).is_none_or(|&(old, _, _)| nd < old) {
                    dist.insert(y, (nd, x, e));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        dist.get(&v)?;
        let mut path = Vec::new();
        let mut x = v;
        while x != u {
            let (_, p, e) = dist[&x];
            path.push(e);
            x = p;
        }
        Some(path)
    }

    /// Removes host edges. Ids that were already deleted are ignored.
    pub fn delete_edges(&mut self, edges: &[EdgeId]) -> Result<()> {
        if let Some(&bad) = edges.iter().find(|&&e| e >= self.host.m()) {
            return Err(SepError::Unknown(format!("edge id {bad}")));
        }
        let mut orphans = Vec::new();
        for &e in edges {
            if !self.alive[e] {
                continue;
            }
            self.alive[e] = false;
            self.alive_m -= 1;
            self.deleted_since_rebuild += 1;
            if self.in_span[e] {
                self.in_span[e] = false;
                orphans.append(&mut self.dependents[e]);
            }
        }
        if self.deleted_since_rebuild > self.rebuild_budget {
            self.rebuild();
            return Ok(());
        }
        for e in orphans {
            if self.alive[e] && !self.in_span[e] {
                self.promote(e);
            }
        }
        Ok(())
    }

    /// Removes every host edge incident to the given vertices.
    pub fn delete_vertices(&mut self, vertices: &[VertexId]) -> Result<()> {
        if let Some(&bad) = vertices.iter().find(|&&v| v >= self.host.n()) {
            return Err(SepError::Unknown(format!("vertex id {bad}")));
        }
        let mut edges = Vec::new();
        for &v in vertices {
            edges.extend(self.host.incident(v).map(|(_, e)| e).filter(|&e| self.alive[e]));
        }
        self.delete_edges(&edges)
    }

    /// Exhaustive check that every surviving host edge is stretched by at most
    /// `2k-1`; quadratic, for tests and debug sweeps.
    pub fn check_stretch(&self) -> bool {
        let limit = self.stretch();
        (0..self.host.m()).filter(|&e| self.alive[e] && !self.in_span[e]).all(|e| {
            let (u, v) = self.host.edge(e);
            let d = dijkstra(self.host, u, |f| self.in_span[f]);
            d[v] != INF && d[v] <= limit.saturating_mul(self.host.edge_weight(e))
        })
    }
}

impl Adjacency for DecrementalSpanner<'_> {
    #[inline]
    fn for_each_neighbor(&self, v: VertexId, f: impl FnMut(VertexId)) {
        DecrementalSpanner::for_each_neighbor(self, v, f)
    }
}
