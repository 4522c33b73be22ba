//! Size/time trade-off: drop high-degree vertices, contract a partition of a
//! spanning tree of what is left, separate the quotient, and lift the answer.

use crate::certificates::{separator_from_cut, MinorReport, MinorWitness, Ratio, SepOrMinor};
use crate::error::{Result, SepError};
use crate::graph::{induced_subgraph, sparsity_guard, Graph, GraphBuilder, GuardOutcome, GuardPolicy, VertexId, VertexSet};
use crate::minorfree::{balanced_minor_free_ell, minor_free_separator, MinorFreeParams, MinorFreeStats};
use crate::par::Parallelism;

/// Rooted spanning forest: `parent[root] == root`; `order` lists vertices so
/// that parents come before children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub parent: Vec<usize>,
    pub order: Vec<usize>,
}

/// Breadth-first spanning forest, roots at the lowest id of each component.
pub fn bfs_spanning_tree(g: &Graph) -> SpanningTree {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    for r in 0..n {
        if parent[r] != usize::MAX {
            continue;
        }
        parent[r] = r;
        let mut head = order.len();
        order.push(r);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in g.neighbors(u) {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    order.push(v);
                }
            }
        }
    }
    SpanningTree { parent, order }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePartition {
    /// Part of each vertex.
    pub part: Vec<u32>,
    pub count: usize,
}

impl TreePartition {
    pub fn members(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &p) in self.part.iter().enumerate() {
            out[p as usize].push(v);
        }
        out
    }
}

/// Cuts the tree into connected parts of at most `target + degree_cap - 1`
/// vertices. Works bottom-up: a vertex absorbs the open part of each child
/// while that keeps it under the limit and otherwise closes the child's part
/// on its own; its own part closes once it reaches `target`.
pub fn partition_spanning_tree(t: &SpanningTree, target: usize, degree_cap: usize) -> Result<TreePartition> {
    if target == 0 {
        return Err(SepError::InvalidParameter("target part size must be positive".into()));
    }
    let n = t.parent.len();
    let mut children = vec![0usize; n];
    for &v in &t.order {
        if t.parent[v] != v {
            children[t.parent[v]] += 1;
        }
    }
    for &v in &t.order {
        let deg = children[v] + usize::from(t.parent[v] != v);
        if deg > degree_cap.max(1) {
            return Err(SepError::Contract(format!("tree vertex {v} has degree {deg} > cap {degree_cap}")));
        }
    }
    let limit = target + degree_cap.max(1) - 1;
    // open part size per vertex; the part hangs off that vertex
    let mut open = vec![0usize; n];
    // representative: vertices absorbed into v's open part point to v
    let mut rep = vec![usize::MAX; n];
    let mut closed_at: Vec<usize> = Vec::new();
    for &v in t.order.iter().rev() {
        open[v] += 1;
        if t.parent[v] == v || open[v] >= target {
            closed_at.push(v);
            continue;
        }
        let p = t.parent[v];
        // the parent's own vertex is counted when it is reached
        if open[p] + 1 + open[v] <= limit {
            open[p] += open[v];
            rep[v] = p;
        } else {
            closed_at.push(v);
        }
    }
    let mut part = vec![u32::MAX; n];
    for (i, &v) in closed_at.iter().enumerate() {
        part[v] = i as u32;
    }
    for &v in &t.order {
        if part[v] == u32::MAX {
            part[v] = part[rep[v]];
        }
    }
    Ok(TreePartition {
        part,
        count: closed_at.len(),
    })
}

/// Contraction of a vertex partition into connected groups.
#[derive(Clone, Debug)]
pub struct QuotientGraph {
    /// Vertex weights are summed group weights.
    pub graph: Graph,
    /// Original vertices of each quotient vertex.
    pub members: Vec<Vec<VertexId>>,
}

/// `map` sends local ids of `g` to the ids the members should carry.
pub fn contract(g: &Graph, p: &TreePartition, map: &[VertexId]) -> QuotientGraph {
    let mut b = GraphBuilder::new(p.count);
    let mut weight = vec![0u64; p.count];
    let mut members = vec![Vec::new(); p.count];
    for (v, &orig) in map.iter().enumerate().take(g.n()) {
        let q = p.part[v] as usize;
        weight[q] += g.vertex_weight(v);
        members[q].push(orig);
    }
    for (q, &w) in weight.iter().enumerate() {
        b.set_vertex_weight(q, w).expect("quotient vertex in range");
    }
    for &(u, v) in g.edges() {
        let (a, c) = (p.part[u] as usize, p.part[v] as usize);
        if a != c {
            b.add_edge(a, c).expect("quotient edge in range");
        }
    }
    QuotientGraph {
        graph: b.build().expect("quotient of a valid graph"),
        members,
    }
}

#[derive(Clone, Debug)]
pub struct TradeoffParams {
    pub h: usize,
    /// Separator exponent, in `[3/4, 1)`.
    pub delta: f64,
    pub eps: f64,
    pub seed: u64,
    pub guard: Option<GuardPolicy>,
    /// Overrides the part size `⌈n^{ε'+1-δ} / h³⌉`.
    pub target: Option<usize>,
    pub parallelism: Parallelism,
}

impl TradeoffParams {
    pub fn new(h: usize, delta: f64) -> Self {
        TradeoffParams {
            h,
            delta,
            eps: 0.5,
            seed: 0,
            guard: Some(GuardPolicy::default()),
            target: None,
            parallelism: Parallelism::default(),
        }
    }

    /// `ε' = 4δ - 3`.
    pub fn eps_prime(&self) -> f64 {
        4.0 * self.delta - 3.0
    }

    /// Degree above which a vertex is removed: `h n^{1-δ}`.
    pub fn degree_threshold(&self, n: usize) -> f64 {
        self.h as f64 * (n as f64).powf(1.0 - self.delta)
    }

    pub fn part_target(&self, n: usize) -> usize {
        self.target.unwrap_or_else(|| {
            let t = (n as f64).powf(self.eps_prime() + 1.0 - self.delta) / (self.h as f64).powi(3);
            t.ceil().max(1.0) as usize
        })
    }
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct TradeoffStats {
    pub high_degree: usize,
    pub degree_cap: usize,
    /// The high-degree set alone was a balanced separator.
    pub high_degree_separates: bool,
    pub target: usize,
    pub parts: usize,
    pub max_part: usize,
    pub quotient_n: usize,
    pub quotient_m: usize,
    pub inner: Option<MinorFreeStats>,
}

#[derive(Clone, Debug)]
pub struct TradeoffOutcome {
    pub result: SepOrMinor,
    pub stats: TradeoffStats,
}

pub fn tradeoff_separator(g: &Graph, params: &TradeoffParams) -> Result<TradeoffOutcome> {
    let h = params.h;
    if h < 2 {
        return Err(SepError::InvalidParameter(format!("h must be at least 2, got {h}")));
    }
    if !(0.75..1.0).contains(&params.delta) {
        return Err(SepError::InvalidParameter(format!("δ must lie in [3/4, 1), got {}", params.delta)));
    }
    if !(params.eps > 0.0 && params.eps <= 1.0) {
        return Err(SepError::InvalidParameter(format!("ε must lie in (0, 1], got {}", params.eps)));
    }
    let mut stats = TradeoffStats::default();
    if let Some(policy) = params.guard {
        if let GuardOutcome::Dense(cert) = sparsity_guard(g, h, policy) {
            return Ok(TradeoffOutcome {
                result: SepOrMinor::DensityCertificate(cert),
                stats,
            });
        }
    }
    let n = g.n();
    let threshold = params.degree_threshold(n.max(1));
    let high: Vec<VertexId> = (0..n).filter(|&v| g.degree(v) as f64 > threshold).collect();
    stats.high_degree = high.len();
    stats.degree_cap = threshold.floor() as usize;
    let mut is_high = vec![false; n];
    for &v in &high {
        is_high[v] = true;
    }
    let total = g.total_vertex_weight();
    let comps = g.components_where(|v| !is_high[v]);
    let heavy = comps.into_iter().find(|c| {
        let w: u64 = c.iter().map(|&v| g.vertex_weight(v)).sum();
        3 * w as u128 > 2 * total as u128
    });
    let Some(mut heavy) = heavy else {
        stats.high_degree_separates = true;
        let sep = separator_from_cut(g, &high, Ratio::TWO_THIRDS, high.len() as u64)?;
        return Ok(TradeoffOutcome {
            result: SepOrMinor::Separator(sep),
            stats,
        });
    };
    heavy.sort_unstable();
    let (local, map) = induced_subgraph(g, &VertexSet::from_iter(n, heavy));
    let tree = bfs_spanning_tree(&local);
    stats.target = params.part_target(n);
    let partition = partition_spanning_tree(&tree, stats.target, stats.degree_cap.max(local.max_degree()))?;
    let q = contract(&local, &partition, &map);
    stats.parts = q.members.len();
    stats.max_part = q.members.iter().map(Vec::len).max().unwrap_or(0);
    stats.quotient_n = q.graph.n();
    stats.quotient_m = q.graph.m();

    let mut inner_params = MinorFreeParams::new(h, balanced_minor_free_ell(q.graph.n(), h));
    inner_params.eps = params.eps;
    inner_params.seed = params.seed;
    inner_params.guard = params.guard;
    inner_params.parallelism = params.parallelism;
    let inner = minor_free_separator(&q.graph, &inner_params)?;
    stats.inner = Some(inner.stats);
    let lift = |set: &[VertexId]| -> Vec<VertexId> {
        let mut out: Vec<VertexId> = set.iter().flat_map(|&x| q.members[x].iter().copied()).collect();
        out.sort_unstable();
        out
    };
    let result = match inner.result {
        SepOrMinor::Separator(s) => {
            let mut cut = lift(&s.separator);
            cut.extend_from_slice(&high);
            cut.sort_unstable();
            let bound = high.len() as u64 + s.claimed_bound.saturating_mul(stats.max_part as u64);
            SepOrMinor::Separator(separator_from_cut(g, &cut, Ratio::TWO_THIRDS, bound)?)
        }
        SepOrMinor::MinorWitness(w) => {
            let sets = w.branch_sets.iter().map(|s| lift(s)).collect();
            let w = MinorWitness::from_branch_sets(g, sets, None).ok_or_else(|| SepError::Internal("lifted branch sets lost adjacency".into()))?;
            SepOrMinor::MinorWitness(w)
        }
        SepOrMinor::DensityCertificate(certificate) => SepOrMinor::MinorReport(MinorReport {
            certificate,
            groups: q.members.clone(),
        }),
        SepOrMinor::MinorReport(r) => SepOrMinor::MinorReport(MinorReport {
            certificate: r.certificate,
            groups: r.groups.iter().map(|s| lift(s)).collect(),
        }),
    };
    Ok(TradeoffOutcome { result, stats })
}

/// The trade-off at `δ = 4/5 + ε`, kept below 1.
pub fn linear_time_separator(g: &Graph, h: usize, eps: f64, seed: u64) -> Result<TradeoffOutcome> {
    let mut p = TradeoffParams::new(h, (0.8 + eps).min(0.999));
    p.eps = eps.clamp(f64::MIN_POSITIVE, 1.0);
    p.seed = seed;
    tradeoff_separator(g, &p)
}
