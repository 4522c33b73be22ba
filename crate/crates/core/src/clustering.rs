//! Edge-disjoint clusterings: weak r-clusterings, r-clusterings with few
//! boundary vertices per cluster, and the nested hierarchy obtained by
//! splitting clusters with separators down to single edges.

use serde::Serialize;

use crate::certificates::{MinorWitness, SepOrMinor};
use crate::error::{Result, SepError};
use crate::graph::{density_check, edge_subgraph, EdgeId, Graph, GuardOutcome, GuardPolicy, VertexId};
use crate::par::{self, Parallelism};
use crate::shallow::{balanced_ell, shallow_separator, ShallowParams};

/// Default constant `C_r` in the admissible range `r > C_r h² ln n`.
pub const DEFAULT_C_R: f64 = 1.0 / 16.0;
/// Default constant `c_b` in the per-cluster boundary cap `c_b h √r ln n`.
pub const DEFAULT_C_B: f64 = 2.0;
/// Pieces with fewer vertices are split by breadth-first bisection instead of
/// a separator search.
pub const SMALL_PIECE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub id: usize,
    pub level: usize,
    /// Sorted.
    pub vertices: Vec<VertexId>,
    /// Sorted subset of `vertices`.
    pub boundary: Vec<VertexId>,
    /// Sorted edge ids of `G`.
    pub edges: Vec<EdgeId>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl Cluster {
    /// Single edges and isolated vertices are never split.
    pub fn is_leaf(&self) -> bool {
        self.edges.len() <= 1
    }

    pub fn local_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.local_index(v).is_some()
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }

    pub fn weight(&self, g: &Graph) -> u64 {
        self.vertices.iter().map(|&v| g.vertex_weight(v)).sum()
    }

    /// Adjacency over local indices (positions in `vertices`).
    pub fn local_adjacency(&self, g: &Graph) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &e in &self.edges {
            let (u, v) = g.edge(e);
            let (i, j) = (self.local_index(u).unwrap(), self.local_index(v).unwrap());
            adj[i].push(j as u32);
            adj[j].push(i as u32);
        }
        adj
    }
}

/// A flat clustering; every cluster has level 1 and no parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
}

impl Clustering {
    /// Boundary vertices counted with multiplicity.
    pub fn boundary_total(&self) -> usize {
        self.clusters.iter().map(|c| c.boundary.len()).sum()
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(|c| c.vertices.len()).max().unwrap_or(0)
    }

    pub fn max_boundary(&self) -> usize {
        self.clusters.iter().map(|c| c.boundary.len()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestedClustering {
    /// Indexed by id.
    pub clusters: Vec<Cluster>,
    /// Ids of the level-1 clusters.
    pub roots: Vec<usize>,
    pub r: usize,
    pub h: usize,
    pub eps: f64,
}

impl NestedClustering {
    pub fn depth(&self) -> usize {
        self.clusters.iter().map(|c| c.level).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.children.is_empty())
    }

    /// `(Σ |C||δC|, Σ |δC|³)` over all clusters.
    pub fn boundary_sums(&self) -> (u128, u128) {
        self.clusters.iter().fold((0, 0), |(a, b), c| {
            let d = c.boundary.len() as u128;
            (a + c.vertices.len() as u128 * d, b + d * d * d)
        })
    }
}

/// Either the requested structure or a minor found while building it.
#[derive(Clone, Debug)]
pub enum Clustered<T> {
    Done(T),
    Minor(SepOrMinor),
}

impl<T> Clustered<T> {
    pub fn done(self) -> Option<T> {
        match self {
            Clustered::Done(t) => Some(t),
            Clustered::Minor(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClusterParams {
    pub r: usize,
    pub h: usize,
    pub eps: f64,
    pub seed: u64,
    pub c_r: f64,
    pub c_b: f64,
    pub guard: Option<GuardPolicy>,
    pub parallelism: Parallelism,
}

impl ClusterParams {
    pub fn new(r: usize, h: usize) -> Self {
        ClusterParams {
            r,
            h,
            eps: 1.0,
            seed: 0,
            c_r: DEFAULT_C_R,
            c_b: DEFAULT_C_B,
            guard: Some(GuardPolicy::default()),
            parallelism: Parallelism::default(),
        }
    }

    /// Lower end of the admissible range for `r` on `n` vertices.
    pub fn r_floor(&self, n: usize) -> f64 {
        self.c_r * (self.h * self.h) as f64 * (n.max(2) as f64).ln()
    }

    /// Per-cluster boundary cap `⌈c_b h √r ln n⌉`.
    pub fn boundary_cap(&self, n: usize) -> usize {
        (self.c_b * self.h as f64 * (self.r as f64).sqrt() * (n.max(2) as f64).ln()).ceil() as usize
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.h < 2 {
            return Err(SepError::InvalidParameter(format!("h must be at least 2, got {}", self.h)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(SepError::InvalidParameter(format!("ε must lie in (0, 1], got {}", self.eps)));
        }
        if self.r < 2 || (self.r as f64) <= self.r_floor(n) {
            return Err(SepError::InvalidParameter(format!(
                "r = {} must exceed max(1, C_r h² ln n) = {:.2}",
                self.r,
                self.r_floor(n).max(1.0)
            )));
        }
        Ok(())
    }
}

/// splitmix64 step, used to derive per-piece seeds.
pub(crate) fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed.wrapping_add(salt.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A connected edge set with its vertices, both sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Piece {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl Piece {
    fn from_cluster(c: &Cluster) -> Piece {
        Piece {
            vertices: c.vertices.clone(),
            edges: c.edges.clone(),
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of an edge set, ordered by smallest vertex.
fn edge_components(g: &Graph, edges: &[EdgeId]) -> Vec<Piece> {
    let mut verts: Vec<VertexId> = edges.iter().flat_map(|&e| {
        let (u, v) = g.edge(e);
        [u, v]
    }).collect();
    verts.sort_unstable();
    verts.dedup();
    let idx = |v: VertexId| verts.binary_search(&v).unwrap();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    for &e in edges {
        let (u, v) = g.edge(e);
        let (a, b) = (find(&mut parent, idx(u)), find(&mut parent, idx(v)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut slot = vec![usize::MAX; verts.len()];
    let mut out: Vec<Piece> = Vec::new();
    for (i, &v) in verts.iter().enumerate() {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Piece { vertices: Vec::new(), edges: Vec::new() });
        }
        out[slot[root]].vertices.push(v);
    }
    for &e in edges {
        let root = find(&mut parent, idx(g.edge(e).0));
        out[slot[root]].edges.push(e);
    }
    for p in &mut out {
        p.edges.sort_unstable();
    }
    out
}

/// Connected components of `g` as pieces; isolated vertices become edgeless
/// pieces.
fn graph_pieces(g: &Graph) -> Vec<Piece> {
    let mut out = Vec::new();
    let (label, count) = g.component_labels(|_| true);
    let mut by_comp: Vec<Piece> = (0..count).map(|_| Piece { vertices: Vec::new(), edges: Vec::new() }).collect();
    for (v, &l) in label.iter().enumerate() {
        by_comp[l].vertices.push(v);
    }
    for (e, &(u, _)) in g.edges().iter().enumerate() {
        by_comp[label[u]].edges.push(e);
    }
    out.extend(by_comp);
    out
}

/// Splits a piece with at least two edges into strictly smaller pieces: the
/// first half of a breadth-first order (connected through BFS parents) and
/// the components of the remaining edges.
fn bisect(g: &Graph, piece: &Piece) -> Vec<Piece> {
    let c = Cluster {
        id: 0,
        level: 0,
        vertices: piece.vertices.clone(),
        boundary: Vec::new(),
        edges: piece.edges.clone(),
        parent: None,
        children: Vec::new(),
    };
    let adj = c.local_adjacency(g);
    let k = piece.vertices.len();
    let mut rank = vec![usize::MAX; k];
    let mut order = vec![0usize];
    rank[0] = 0;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in &adj[u] {
            if rank[v as usize] == usize::MAX {
                rank[v as usize] = order.len();
                order.push(v as usize);
            }
        }
    }
    let half = k.div_ceil(2);
    let (mut low, mut high) = (Vec::new(), Vec::new());
    for &e in &piece.edges {
        let (u, v) = g.edge(e);
        let r = rank[c.local_index(u).unwrap()].max(rank[c.local_index(v).unwrap()]);
        if r < half {
            low.push(e);
        } else {
            high.push(e);
        }
    }
    let mut out = edge_components(g, &low);
    out.extend(edge_components(g, &high));
    out
}

/// Result of splitting one piece.
enum Split {
    Parts { parts: Vec<Piece>, separator: Vec<VertexId> },
    Minor(SepOrMinor),
}

/// Maps a minor found in the subgraph on `map` (local → global ids) to `g`.
fn lift_minor(g: &Graph, local: SepOrMinor, map: &[VertexId], h: usize) -> Result<SepOrMinor> {
    match local {
        SepOrMinor::MinorWitness(w) => {
            let sets = w.branch_sets.iter().map(|s| s.iter().map(|&v| map[v]).collect()).collect();
            MinorWitness::from_branch_sets(g, sets, w.depth_bound)
                .map(SepOrMinor::MinorWitness)
                .ok_or_else(|| SepError::Internal("lifted branch sets lost adjacency".into()))
        }
        SepOrMinor::DensityCertificate(cert) => {
            // singleton groups; the induced edge count can only be larger
            let mut inside = vec![false; g.n()];
            for &v in map {
                inside[v] = true;
            }
            let m = g.edges().iter().filter(|&&(u, v)| inside[u] && inside[v]).count();
            match density_check(map.len(), m, h, cert.policy) {
                GuardOutcome::Dense(c) => Ok(SepOrMinor::MinorReport(crate::certificates::MinorReport {
                    certificate: c,
                    groups: map.iter().map(|&v| vec![v]).collect(),
                })),
                GuardOutcome::Pass => Err(SepError::Internal("lifted density certificate no longer dense".into())),
            }
        }
        other => Ok(other),
    }
}

/// Separates `piece` under vertex weights `weight` (zero allowed) with the
/// shallow-minor separator at parameter `ell`, then regroups its edges into
/// connected parts on either side. Falls back to bisection for small pieces,
/// weightless pieces, or when no part got strictly smaller.
#[allow(clippy::too_many_arguments)]
fn split_piece(
    g: &Graph,
    piece: &Piece,
    weight: impl Fn(VertexId) -> u64,
    ell: Option<usize>,
    h: usize,
    eps: f64,
    seed: u64,
    guard: Option<GuardPolicy>,
) -> Result<Split> {
    debug_assert!(piece.edges.len() >= 2);
    let total: u64 = piece.vertices.iter().map(|&v| weight(v)).sum();
    if piece.vertices.len() < SMALL_PIECE || total == 0 {
        return Ok(Split::Parts { parts: bisect(g, piece), separator: Vec::new() });
    }
    let (local, map) = edge_subgraph(g, &piece.vertices, &piece.edges, &weight);
    let ell = ell.unwrap_or_else(|| balanced_ell(local.n(), h)).max(1);
    let mut params = ShallowParams::new(h, ell);
    params.eps = eps;
    params.seed = seed;
    params.guard = guard;
    let out = shallow_separator(&local, &params)?;
    let sep = match out.result {
        SepOrMinor::Separator(s) => s,
        other => return Ok(Split::Minor(lift_minor(g, other, &map, h)?)),
    };
    let mut side = vec![0u8; local.n()];
    for &v in &sep.a {
        side[v] = 1;
    }
    for &v in &sep.b {
        side[v] = 2;
    }
    let (mut a_edges, mut b_edges) = (Vec::new(), Vec::new());
    for &e in &piece.edges {
        let (u, v) = g.edge(e);
        let (su, sv) = (side[map.binary_search(&u).unwrap()], side[map.binary_search(&v).unwrap()]);
        if su == 2 || sv == 2 {
            b_edges.push(e);
        } else {
            a_edges.push(e);
        }
    }
    let mut parts = edge_components(g, &a_edges);
    parts.extend(edge_components(g, &b_edges));
    if parts.iter().any(|p| p.edges.len() >= piece.edges.len()) {
        return Ok(Split::Parts { parts: bisect(g, piece), separator: Vec::new() });
    }
    let separator = sep.separator.iter().map(|&v| map[v]).collect();
    Ok(Split::Parts { parts, separator })
}

/// Level-1 clusters from pieces; boundary = vertices in two or more pieces.
fn flat_clustering(n: usize, pieces: Vec<Piece>) -> Clustering {
    let mut count = vec![0u32; n];
    for p in &pieces {
        for &v in &p.vertices {
            count[v] += 1;
        }
    }
    let clusters = pieces
        .into_iter()
        .enumerate()
        .map(|(id, p)| Cluster {
            id,
            level: 1,
            boundary: p.vertices.iter().copied().filter(|&v| count[v] > 1).collect(),
            vertices: p.vertices,
            edges: p.edges,
            parent: None,
            children: Vec::new(),
        })
        .collect();
    Clustering { clusters }
}

/// Recursively separates components with more than `r` vertices. Each piece
/// of `n̂` vertices is cut by the shallow-minor separator at
/// `ℓ = n̂^{1-ε'}/(h r^{1/2-ε'} √ln n̂)`, `ε' = ε/3`.
pub fn weak_r_clustering(g: &Graph, params: &ClusterParams) -> Result<Clustered<Clustering>> {
    params.validate(g.n())?;
    if let Some(policy) = params.guard {
        if let GuardOutcome::Dense(cert) = crate::graph::sparsity_guard(g, params.h, policy) {
            return Ok(Clustered::Minor(SepOrMinor::DensityCertificate(cert)));
        }
    }
    let (r, h) = (params.r, params.h);
    let eps3 = params.eps / 3.0;
    let mut done = Vec::new();
    let mut stack = graph_pieces(g);
    stack.reverse();
    let mut salt = 0u64;
    while let Some(piece) = stack.pop() {
        if piece.vertices.len() <= r || piece.edges.len() <= 1 {
            done.push(piece);
            continue;
        }
        let nh = piece.vertices.len() as f64;
        let ell = nh.powf(1.0 - eps3) / (h as f64 * (r as f64).powf(0.5 - eps3) * nh.ln().sqrt());
        salt += 1;
        match split_piece(g, &piece, |_| 1, Some(ell.floor().max(1.0) as usize), h, eps3, mix(params.seed, salt), params.guard)? {
            Split::Minor(m) => return Ok(Clustered::Minor(m)),
            Split::Parts { mut parts, .. } => {
                parts.reverse();
                stack.extend(parts);
            }
        }
    }
    Ok(Clustered::Done(flat_clustering(g.n(), done)))
}

/// Splits clusters holding more than `cap` boundary vertices, weighting the
/// boundary vertices uniformly, until every cluster is within the cap or is a
/// single edge.
pub fn refine_with_cap(g: &Graph, weak: &Clustering, cap: usize, params: &ClusterParams) -> Result<Clustered<Clustering>> {
    let n = g.n();
    let mut count = vec![0u32; n];
    let mut pieces: Vec<Option<Piece>> = Vec::new();
    for c in &weak.clusters {
        for &v in &c.vertices {
            count[v] += 1;
        }
        pieces.push(Some(Piece::from_cluster(c)));
    }
    let boundary_len = |p: &Piece, count: &[u32]| p.vertices.iter().filter(|&&v| count[v] > 1).count();
    let mut work: Vec<usize> = (0..pieces.len()).rev().collect();
    let mut salt = 0u64;
    while let Some(i) = work.pop() {
        let piece = pieces[i].as_ref().unwrap();
        if piece.edges.len() <= 1 || boundary_len(piece, &count) <= cap {
            continue;
        }
        let piece = pieces[i].take().unwrap();
        salt += 1;
        let counts = &count;
        let split = split_piece(
            g,
            &piece,
            |v| u64::from(counts[v] > 1),
            None,
            params.h,
            params.eps / 2.0,
            mix(params.seed ^ 0x5EED, salt),
            params.guard,
        )?;
        let parts = match split {
            Split::Minor(m) => return Ok(Clustered::Minor(m)),
            Split::Parts { parts, .. } => parts,
        };
        for &v in &piece.vertices {
            count[v] -= 1;
        }
        for p in parts {
            for &v in &p.vertices {
                count[v] += 1;
            }
            work.push(pieces.len());
            pieces.push(Some(p));
        }
    }
    Ok(Clustered::Done(flat_clustering(n, pieces.into_iter().flatten().collect())))
}

/// Refinement with the default cap `⌈c_b h √r ln n⌉`.
pub fn refine_to_r_clustering(g: &Graph, weak: &Clustering, params: &ClusterParams) -> Result<Clustered<Clustering>> {
    refine_with_cap(g, weak, params.boundary_cap(g.n()), params)
}

/// Children of one split, before ids and boundaries are assigned.
#[derive(Clone, Debug)]
pub struct ClusterSplit {
    /// `(vertices, edges)` per child, both sorted.
    pub children: Vec<(Vec<VertexId>, Vec<EdgeId>)>,
    /// Vertices of the separators used; each is shared by several children.
    pub separator: Vec<VertexId>,
}

/// Splits a cluster so that children shrink in both vertex count and number
/// of inherited boundary vertices: first a separator under unit weights, then
/// any part still holding more than `⌊2|δC|/3⌋` plus the separator size of the
/// parent's boundary is split again with weight on those boundary vertices.
/// Returns `None` for leaves.
pub fn split_cluster_two_weights(g: &Graph, c: &Cluster, h: usize, eps: f64, seed: u64) -> Result<Clustered<Option<ClusterSplit>>> {
    split_cluster_guarded(g, c, h, eps, seed, Some(GuardPolicy::default()))
}

fn split_cluster_guarded(g: &Graph, c: &Cluster, h: usize, eps: f64, seed: u64, guard: Option<GuardPolicy>) -> Result<Clustered<Option<ClusterSplit>>> {
    if c.is_leaf() {
        return Ok(Clustered::Done(None));
    }
    let whole = Piece::from_cluster(c);
    let (mut parts, mut separator) = match split_piece(g, &whole, |_| 1, None, h, eps, seed, guard)? {
        Split::Minor(m) => return Ok(Clustered::Minor(m)),
        Split::Parts { parts, separator } => (parts, separator),
    };
    let inherited = |p: &Piece| p.vertices.iter().filter(|&&v| c.is_boundary(v)).count();
    let mut round = 0u64;
    loop {
        let limit = 2 * c.boundary.len() / 3 + separator.len();
        let Some(i) = parts.iter().position(|p| p.edges.len() >= 2 && inherited(p) > limit) else {
            break;
        };
        let p = parts.swap_remove(i);
        round += 1;
        match split_piece(g, &p, |v| u64::from(c.is_boundary(v)), None, h, eps, mix(seed, round), guard)? {
            Split::Minor(m) => return Ok(Clustered::Minor(m)),
            Split::Parts { parts: more, separator: s } => {
                parts.extend(more);
                separator.extend(s);
            }
        }
    }
    separator.sort_unstable();
    separator.dedup();
    parts.sort_by(|a, b| (a.vertices[0], a.edges[0]).cmp(&(b.vertices[0], b.edges[0])));
    Ok(Clustered::Done(Some(ClusterSplit {
        children: parts.into_iter().map(|p| (p.vertices, p.edges)).collect(),
        separator,
    })))
}

/// Boundary of each child: inherited parent boundary plus vertices shared
/// with a sibling. Single edges and isolated vertices count all their
/// vertices as boundary.
fn child_boundaries(parent: &Cluster, children: &[(Vec<VertexId>, Vec<EdgeId>)]) -> Vec<Vec<VertexId>> {
    let mut count: std::collections::HashMap<VertexId, u32> = std::collections::HashMap::new();
    for (vs, _) in children {
        for &v in vs {
            *count.entry(v).or_insert(0) += 1;
        }
    }
    children
        .iter()
        .map(|(vs, es)| {
            if es.len() <= 1 {
                return vs.clone();
            }
            vs.iter().copied().filter(|&v| count[&v] > 1 || parent.is_boundary(v)).collect()
        })
        .collect()
}

/// Builds the full hierarchy: a refined r-clustering at level 1, then every
/// cluster split recursively down to single edges. Clusters of one level are
/// split in parallel.
pub fn nested_r_clustering(g: &Graph, params: &ClusterParams) -> Result<Clustered<NestedClustering>> {
    let weak = match weak_r_clustering(g, params)? {
        Clustered::Done(w) => w,
        Clustered::Minor(m) => return Ok(Clustered::Minor(m)),
    };
    let flat = match refine_to_r_clustering(g, &weak, params)? {
        Clustered::Done(f) => f,
        Clustered::Minor(m) => return Ok(Clustered::Minor(m)),
    };
    let mut clusters = flat.clusters;
    for c in &mut clusters {
        if c.is_leaf() {
            c.boundary = c.vertices.clone();
        }
    }
    let roots: Vec<usize> = (0..clusters.len()).collect();
    let mut frontier: Vec<usize> = roots.iter().copied().filter(|&i| !clusters[i].is_leaf()).collect();
    while !frontier.is_empty() {
        let splits = par::map(params.parallelism, &frontier, |&id| {
            split_cluster_guarded(g, &clusters[id], params.h, params.eps, mix(params.seed ^ 0xC1u64, id as u64), params.guard)
        });
        let mut next = Vec::new();
        for (&id, split) in frontier.iter().zip(splits) {
            let split = match split? {
                Clustered::Minor(m) => return Ok(Clustered::Minor(m)),
                Clustered::Done(s) => s.ok_or_else(|| SepError::Internal("non-leaf cluster was not split".into()))?,
            };
            let bounds = child_boundaries(&clusters[id], &split.children);
            let level = clusters[id].level + 1;
            for ((vertices, edges), boundary) in split.children.into_iter().zip(bounds) {
                let cid = clusters.len();
                let leaf = edges.len() <= 1;
                clusters.push(Cluster {
                    id: cid,
                    level,
                    vertices,
                    boundary,
                    edges,
                    parent: Some(id),
                    children: Vec::new(),
                });
                clusters[id].children.push(cid);
                if !leaf {
                    next.push(cid);
                }
            }
        }
        frontier = next;
    }
    Ok(Clustered::Done(NestedClustering {
        clusters,
        roots,
        r: params.r,
        h: params.h,
        eps: params.eps,
    }))
}

/// Hierarchy dump: one object per cluster with level, parent, children,
/// sizes and boundary.
pub fn cluster_json(nc: &NestedClustering) -> serde_json::Value {
    let clusters: Vec<serde_json::Value> = nc
        .clusters
        .iter()
        .map(|c| {
            serde_json::json!({
                "id": c.id,
                "level": c.level,
                "parent": c.parent,
                "children": c.children,
                "vertices": c.vertices.len(),
                "edges": c.edges.len(),
                "boundary": c.boundary,
            })
        })
        .collect();
    let (s1, s3) = nc.boundary_sums();
    serde_json::json!({
        "r": nc.r,
        "h": nc.h,
        "eps": nc.eps,
        "depth": nc.depth(),
        "roots": nc.roots,
        "sum_size_times_boundary": s1.to_string(),
        "sum_boundary_cubed": s3.to_string(),
        "clusters": clusters,
    })
}

/// Structural check of a hierarchy: clusters are connected with vertex sets
/// equal to their edge endpoints, level-1 clusters partition the edges of `G`,
/// children partition their parent's edges, boundaries follow the sharing
/// rule, and leaves are single edges or isolated vertices.
pub fn check_nested(g: &Graph, nc: &NestedClustering) -> Vec<String> {
    let mut out = Vec::new();
    let mut owner = vec![usize::MAX; g.m()];
    for &id in &nc.roots {
        for &e in &nc.clusters[id].edges {
            if owner[e] != usize::MAX {
                out.push(format!("edge {e} in level-1 clusters {} and {id}", owner[e]));
            }
            owner[e] = id;
        }
    }
    if let Some(e) = owner.iter().position(|&o| o == usize::MAX) {
        out.push(format!("edge {e} is in no level-1 cluster"));
    }
    for c in &nc.clusters {
        if !c.edges.is_empty() {
            let comps = edge_components(g, &c.edges);
            if comps.len() != 1 || comps[0].vertices != c.vertices {
                out.push(format!("cluster {} is not connected or has stray vertices", c.id));
            }
        } else if c.vertices.len() != 1 {
            out.push(format!("edgeless cluster {} has {} vertices", c.id, c.vertices.len()));
        }
        if c.children.is_empty() && !c.is_leaf() {
            out.push(format!("cluster {} has {} edges but no children", c.id, c.edges.len()));
        }
        if c.children.is_empty() {
            continue;
        }
        let mut edges: Vec<EdgeId> = c.children.iter().flat_map(|&k| nc.clusters[k].edges.iter().copied()).collect();
        edges.sort_unstable();
        if edges != c.edges {
            out.push(format!("children of {} do not partition its edges", c.id));
        }
        let kids: Vec<(Vec<VertexId>, Vec<EdgeId>)> =
            c.children.iter().map(|&k| (nc.clusters[k].vertices.clone(), nc.clusters[k].edges.clone())).collect();
        for (&k, b) in c.children.iter().zip(child_boundaries(c, &kids)) {
            let kid = &nc.clusters[k];
            if kid.boundary != b || kid.level != c.level + 1 || kid.parent != Some(c.id) {
                out.push(format!("child {k} of {} has wrong boundary, level or parent", c.id));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn r_at_least_n_gives_one_cluster() {
        let g = generators::path(20);
        let c = weak_r_clustering(&g, &ClusterParams::new(20, 3)).unwrap().done().unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert_eq!(c.boundary_total(), 0);
    }

    #[test]
    fn path_weak_clustering() {
        let g = generators::path(100);
        let c = weak_r_clustering(&g, &ClusterParams::new(10, 3)).unwrap().done().unwrap();
        assert!(c.clusters.len() >= 10);
        assert!(c.max_cluster_size() <= 10);
        let mut mult = vec![0; 100];
        for cl in &c.clusters {
            for &v in &cl.boundary {
                mult[v] += 1;
            }
        }
        assert!(mult.iter().all(|&m| m == 0 || m == 2));
    }

    #[test]
    fn r_below_floor_is_rejected() {
        let g = generators::grid(16, 16);
        assert!(weak_r_clustering(&g, &ClusterParams::new(1, 5)).is_err());
        let mut p = ClusterParams::new(32, 5);
        p.c_r = 4.0;
        assert!(weak_r_clustering(&g, &p).is_err());
    }

    #[test]
    fn star_refinement_respects_cap() {
        // star with 40 leaves; leaves 1..=20 also carry a pendant edge
        let mut e: Vec<(usize, usize)> = (1..=40).map(|i| (0, i)).collect();
        e.extend((1..=20).map(|i| (i, 40 + i)));
        let g = Graph::from_edges(61, &e).unwrap();
        let pieces: Vec<Piece> = std::iter::once(Piece { vertices: (0..=40).collect(), edges: (0..40).collect() })
            .chain((0..20).map(|i| Piece { vertices: vec![i + 1, 41 + i], edges: vec![40 + i] }))
            .collect();
        let weak = flat_clustering(61, pieces);
        assert_eq!(weak.clusters[0].boundary.len(), 20);
        let p = ClusterParams::new(50, 3);
        let refined = refine_with_cap(&g, &weak, 10, &p).unwrap().done().unwrap();
        assert!(refined.clusters.iter().all(|c| c.boundary.len() <= 10 || c.edges.len() <= 1));
        let same = refine_with_cap(&g, &weak, 20, &p).unwrap().done().unwrap();
        assert_eq!(same, weak);
    }

    #[test]
    fn path_split_halves_size() {
        let g = generators::path(64);
        let c = Cluster {
            id: 0,
            level: 1,
            vertices: (0..64).collect(),
            boundary: vec![0, 63],
            edges: (0..63).collect(),
            parent: None,
            children: vec![],
        };
        let s = split_cluster_two_weights(&g, &c, 3, 1.0, 1).unwrap().done().unwrap().unwrap();
        assert!(s.children.len() >= 2);
        for (vs, _) in &s.children {
            assert!(vs.len() <= 2 * 64 / 3 + s.separator.len() + 1);
            assert!(vs.iter().filter(|&&v| v == 0 || v == 63).count() <= 1 + s.separator.len());
        }
        let leaf = Cluster { vertices: vec![0, 1], boundary: vec![0, 1], edges: vec![0], ..c };
        assert!(split_cluster_two_weights(&g, &leaf, 3, 1.0, 1).unwrap().done().unwrap().is_none());
    }

    #[test]
    fn grid_hierarchy_is_well_formed() {
        let g = generators::grid(16, 16);
        let p = ClusterParams::new(32, 5);
        let nc = nested_r_clustering(&g, &p).unwrap().done().unwrap();
        assert_eq!(check_nested(&g, &nc), Vec::<String>::new());
        assert!(nc.roots.iter().all(|&id| nc.clusters[id].vertices.len() <= 32));
        assert!(nc.leaves().all(|c| c.edges.len() == 1));
        let mut seq = p.clone();
        seq.parallelism = Parallelism::Sequential;
        assert_eq!(nested_r_clustering(&g, &seq).unwrap().done().unwrap(), nc);
    }

    #[test]
    fn single_edge_and_dense_inputs() {
        let g = generators::path(2);
        let nc = nested_r_clustering(&g, &ClusterParams::new(2, 2)).unwrap().done().unwrap();
        assert_eq!(nc.clusters.len(), 1);
        assert!(nc.clusters[0].is_leaf());
        let k10 = generators::complete(10);
        let out = nested_r_clustering(&k10, &ClusterParams::new(3, 4)).unwrap();
        match out {
            Clustered::Minor(m) => assert!(crate::certificates::verify(&k10, &m, 4).ok),
            Clustered::Done(_) => panic!("K10 has a K4 minor"),
        }
    }
}
