//! Separator or shallow clique minor by iterative ball growth on a
//! decremental spanner.
//!
//! The vertex set is split four ways: `V_r` (settled, light), `M` (the branch
//! sets of a clique minor under construction), `B` (boundary) and `V'` (still
//! live). Each iteration either grows the minor by one branch set, discards a
//! branch set that no longer touches the live part, or cuts a thin slice off
//! the live part. The loop ends with `h` branch sets or when no component of
//! the live part is heavier than 2/3 of the total, and then `M ∪ B` separates.

use crate::certificates::{induced_diameter, separator_from_cut, MinorWitness, Ratio, SepOrMinor};
use crate::error::{Result, SepError};
use crate::graph::{sparsity_guard, Graph, GuardOutcome, GuardPolicy, SwapSet, VertexId};
use crate::spanner::DecrementalSpanner;
use crate::tree_or_cut::{self, cut_conditions_hold, tree_is_valid, TreeOrCut};

#[derive(Clone, Debug)]
pub struct ShallowParams {
    pub h: usize,
    pub ell: usize,
    pub eps: f64,
    pub seed: u64,
    /// Density check run before anything else; `None` disables it.
    pub guard: Option<GuardPolicy>,
    /// Re-verify the loop invariants after every iteration.
    pub check_invariants: bool,
}

impl ShallowParams {
    pub fn new(h: usize, ell: usize) -> Self {
        ShallowParams {
            h,
            ell,
            eps: 1.0,
            seed: 0,
            guard: Some(GuardPolicy::default()),
            check_invariants: false,
        }
    }

    /// `k = ⌈2/ε⌉`, the spanner parameter.
    pub fn k(&self) -> usize {
        (2.0 / self.eps - 1e-9).ceil().max(1.0) as usize
    }

    /// Spanner stretch `δ = 2k - 1`.
    pub fn delta(&self) -> usize {
        2 * self.k() - 1
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

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ShallowStats {
    pub iterations: usize,
    pub trees: usize,
    pub cuts: usize,
    pub dropped_branch_sets: usize,
    pub spanner_rebuilds: usize,
    pub spanner_promotions: usize,
    pub max_tree_depth: usize,
    pub invariant_checks: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ShallowOutcome {
    pub result: SepOrMinor,
    pub stats: ShallowStats,
    /// Branch sets held in `M` when the loop stopped (a clique minor of that
    /// order, possibly smaller than `h`).
    pub branch_sets: Vec<Vec<VertexId>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Rest,
    Minor,
    Boundary,
    Live,
}

/// Size bounds that the loop guarantees, derived from `n`, `h`, `ℓ`, `δ`.
#[derive(Clone, Copy, Debug)]
pub struct ShallowBounds {
    /// Layers added around a found tree when it is padded.
    pub pad_layers: usize,
    /// Size a found tree is padded to (before the `|V(G')|/h` cap).
    pub pad_target: usize,
    pub max_tree_depth: usize,
    pub max_branch_size: usize,
    pub separator: u64,
}

impl ShallowBounds {
    pub fn new(n: usize, h: usize, ell: usize, delta: usize) -> Self {
        let ln_n = (n.max(2) as f64).ln();
        let pad_layers = ((ell as f64 * ln_n).ceil() as usize).max(1);
        let pad_target = ((h as f64 * ell as f64 * ln_n).ceil() as usize).max(1);
        let max_tree_depth = tree_or_cut::max_depth(n, ell, delta);
        let max_branch_size = ((h - 1) * max_tree_depth + 1).max(pad_target);
        let separator = (n / ell) as u64 + ((h - 1) as u64).saturating_mul(max_branch_size as u64);
        ShallowBounds {
            pad_layers,
            pad_target,
            max_tree_depth,
            max_branch_size,
            separator,
        }
    }
}

struct State<'g> {
    g: &'g Graph,
    total: u64,
    side: Vec<Side>,
    live: SwapSet,
    live_weight: u64,
    rest_count: usize,
    rest_weight: u64,
    boundary_count: usize,
    branch: Vec<Vec<VertexId>>,
    branch_diameter: Vec<u64>,
    spanner: DecrementalSpanner<'g>,
    cursor: usize,
}

fn heavy(w: u64, total: u64) -> bool {
    3 * w as u128 > 2 * total as u128
}

impl<'g> State<'g> {
    fn move_to(&mut self, v: VertexId, to: Side) {
        let from = self.side[v];
        let w = self.g.vertex_weight(v);
        match from {
            Side::Live => {
                self.live.remove(v);
                self.live_weight -= w;
            }
            Side::Rest => {
                self.rest_count -= 1;
                self.rest_weight -= w;
            }
            Side::Boundary => self.boundary_count -= 1,
            Side::Minor => {}
        }
        match to {
            Side::Live => unreachable!("vertices never return to the live part"),
            Side::Rest => {
                self.rest_count += 1;
                self.rest_weight += w;
            }
            Side::Boundary => self.boundary_count += 1,
            Side::Minor => {}
        }
        self.side[v] = to;
    }

    /// Lowest-id live vertex. Live vertices only ever leave, so a cursor works.
    fn lowest_live(&mut self) -> VertexId {
        while !self.live.contains(self.cursor) {
            self.cursor += 1;
        }
        self.cursor
    }

    /// Splits the live part into components; keeps the heavy one live and
    /// settles the rest. Returns false when no component is heavy.
    fn refocus(&mut self) -> Result<bool> {
        if self.live.is_empty() {
            return Ok(false);
        }
        let n = self.g.n();
        let mut label = vec![usize::MAX; n];
        let mut comps: Vec<(Vec<VertexId>, u64)> = Vec::new();
        let members: Vec<VertexId> = self.live.to_sorted_vec();
        for &s in &members {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            label[s] = id;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            let mut w = 0;
            while let Some(u) = stack.pop() {
                comp.push(u);
                w += self.g.vertex_weight(u);
                self.spanner.for_each_neighbor(u, |x| {
                    if label[x] == usize::MAX {
                        label[x] = id;
                        stack.push(x);
                    }
                });
            }
            comps.push((comp, w));
        }
        if comps.len() == 1 {
            return Ok(heavy(comps[0].1, self.total));
        }
        let Some(keep) = comps.iter().position(|(_, w)| heavy(*w, self.total)) else {
            return Ok(false);
        };
        let mut settled = Vec::new();
        for (i, (comp, _)) in comps.iter().enumerate() {
            if i != keep {
                settled.extend_from_slice(comp);
            }
        }
        for &v in &settled {
            self.move_to(v, Side::Rest);
        }
        self.spanner.delete_vertices(&settled)?;
        Ok(true)
    }

    /// `running`: a heavy live component exists. The bounds on `V_r` are only
    /// promised while it does.
    fn check(&self, running: bool, h: usize, ell: usize, bounds: &ShallowBounds, stats: &mut ShallowStats) {
        stats.invariant_checks += 1;
        let mut fail = |msg: String| stats.violations.push(format!("iteration {}: {msg}", stats.iterations));
        if self.branch.len() > h {
            fail(format!("{} branch sets exceed h = {h}", self.branch.len()));
        }
        for (i, set) in self.branch.iter().enumerate() {
            if set.len() > bounds.max_branch_size {
                fail(format!("branch set {i} has {} vertices > {}", set.len(), bounds.max_branch_size));
            }
            match induced_diameter(self.g, set) {
                None => fail(format!("branch set {i} is disconnected")),
                Some(d) if d as u64 > self.branch_diameter[i] => {
                    fail(format!("branch set {i} has diameter {d} > {}", self.branch_diameter[i]))
                }
                _ => {}
            }
        }
        if MinorWitness::from_branch_sets(self.g, self.branch.clone(), None).is_none() {
            fail("some pair of branch sets is not adjacent".into());
        }
        if running && ell * self.boundary_count > self.rest_count {
            fail(format!("|B| = {} exceeds |V_r|/ℓ = {}/{ell}", self.boundary_count, self.rest_count));
        }
        if running && 3 * self.rest_weight as u128 > 2 * self.total as u128 {
            fail(format!("w(V_r) = {} exceeds 2/3 of {}", self.rest_weight, self.total));
        }
        for &(u, v) in self.g.edges() {
            let pair = (self.side[u], self.side[v]);
            if pair == (Side::Rest, Side::Live) || pair == (Side::Live, Side::Rest) {
                fail(format!("edge {u}-{v} joins V_r and V'"));
                break;
            }
        }
    }
}

pub fn shallow_separator(g: &Graph, params: &ShallowParams) -> Result<ShallowOutcome> {
    params.validate()?;
    let h = params.h;
    let ell = params.ell;
    let delta = params.delta();
    let mut stats = ShallowStats::default();
    if let Some(policy) = params.guard {
        if let GuardOutcome::Dense(cert) = sparsity_guard(g, h, policy) {
            return Ok(ShallowOutcome {
                result: SepOrMinor::DensityCertificate(cert),
                stats,
                branch_sets: Vec::new(),
            });
        }
    }
    let n = g.n();
    let bounds = ShallowBounds::new(n, h, ell, delta);
    let total = g.total_vertex_weight();

    let mut side = vec![Side::Rest; n];
    let mut live = SwapSet::new(n);
    let mut live_weight = 0;
    let comps = g.components_where(|_| true);
    if let Some(c) = comps.iter().find(|c| heavy(c.iter().map(|&v| g.vertex_weight(v)).sum(), total)) {
        for &v in c {
            side[v] = Side::Live;
            live.insert(v);
            live_weight += g.vertex_weight(v);
        }
    }
    let rest_count = n - live.len();
    let rest_weight = total - live_weight;
    let alive: Vec<bool> = g.edges().iter().map(|&(u, v)| live.contains(u) && live.contains(v)).collect();
    let spanner = DecrementalSpanner::with_edges(g, params.k(), params.seed, alive);
    let mut st = State {
        g,
        total,
        side,
        live,
        live_weight,
        rest_count,
        rest_weight,
        boundary_count: 0,
        branch: Vec::new(),
        branch_diameter: Vec::new(),
        spanner,
        cursor: 0,
    };
    let mut running = !st.live.is_empty();
    if params.check_invariants {
        st.check(running, h, ell, &bounds, &mut stats);
    }
    let limit = 2 * n + 2;

    while running && st.branch.len() < h {
        stats.iterations += 1;
        if stats.iterations > limit {
            return Err(SepError::Internal("separator loop made no progress".into()));
        }
        let mut a_sets = Vec::with_capacity(st.branch.len());
        let mut empty = Vec::new();
        for (i, set) in st.branch.iter().enumerate() {
            let mut a: Vec<VertexId> = set.iter().flat_map(|&u| g.neighbors(u)).copied().filter(|&v| st.live.contains(v)).collect();
            a.sort_unstable();
            a.dedup();
            if a.is_empty() {
                empty.push(i);
            }
            a_sets.push(a);
        }
        if !empty.is_empty() {
            for &i in empty.iter().rev() {
                let set = st.branch.remove(i);
                st.branch_diameter.remove(i);
                for v in set {
                    st.move_to(v, Side::Rest);
                }
                stats.dropped_branch_sets += 1;
            }
            if params.check_invariants {
                st.check(running, h, ell, &bounds, &mut stats);
            }
            continue;
        }
        let start = match a_sets.first() {
            Some(a) => a[0],
            None => st.lowest_live(),
        };
        let found = tree_or_cut::tree_or_cut_in(&st.spanner, n, st.live.len(), &a_sets, ell, delta, start)?;
        match found {
            TreeOrCut::Tree { ref vertices, depth, .. } => {
                if params.check_invariants {
                    if !tree_is_valid(&st.spanner, n, &found, &a_sets) {
                        stats.violations.push(format!("iteration {}: invalid tree", stats.iterations));
                    }
                    if depth > bounds.max_tree_depth || vertices.len() > a_sets.len() * depth + 1 {
                        stats.violations.push(format!(
                            "iteration {}: tree depth {depth} / size {} over bound",
                            stats.iterations,
                            vertices.len()
                        ));
                    }
                }
                stats.max_tree_depth = stats.max_tree_depth.max(depth);
                let target = bounds.pad_target.min((st.live.len() / h).max(1));
                let (set, layers) = pad(g, |v| st.live.contains(v), vertices, target, bounds.pad_layers);
                for &v in &set {
                    st.move_to(v, Side::Minor);
                }
                st.spanner.delete_vertices(&set)?;
                st.branch.push(set);
                st.branch_diameter.push(2 * (depth + layers) as u64);
                stats.trees += 1;
            }
            TreeOrCut::Cut { ref s, .. } => {
                if params.check_invariants {
                    let universe = st.live.to_sorted_vec();
                    let (a, b) = cut_conditions_hold(&st.spanner, n, &universe, s, ell, delta);
                    if !(a && b) {
                        stats.violations.push(format!("iteration {}: cut conditions fail ({a}, {b})", stats.iterations));
                    }
                }
                let mut in_s = vec![false; n];
                for &v in s {
                    in_s[v] = true;
                }
                let w_s: u64 = s.iter().map(|&v| g.vertex_weight(v)).sum();
                let w_rest = st.live_weight - w_s;
                let rest_len = st.live.len() - s.len();
                let take_s = match w_s.cmp(&w_rest) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => match s.len().cmp(&rest_len) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => {
                            let lowest_rest = st.live.as_slice().iter().copied().filter(|&v| !in_s[v]).min();
                            Some(s[0]) < lowest_rest
                        }
                    },
                };
                let slice: Vec<VertexId> = if take_s {
                    s.clone()
                } else {
                    let mut c: Vec<VertexId> = st.live.as_slice().iter().copied().filter(|&v| !in_s[v]).collect();
                    c.sort_unstable();
                    c
                };
                let mut in_slice = vec![false; n];
                for &v in &slice {
                    in_slice[v] = true;
                }
                let mut boundary: Vec<VertexId> = slice
                    .iter()
                    .flat_map(|&u| g.neighbors(u))
                    .copied()
                    .filter(|&v| !in_slice[v] && st.live.contains(v))
                    .collect();
                boundary.sort_unstable();
                boundary.dedup();
                for &v in &slice {
                    st.move_to(v, Side::Rest);
                }
                for &v in &boundary {
                    st.move_to(v, Side::Boundary);
                }
                let mut removed = slice;
                removed.extend_from_slice(&boundary);
                st.spanner.delete_vertices(&removed)?;
                stats.cuts += 1;
            }
        }
        running = st.refocus()?;
        if params.check_invariants {
            st.check(running, h, ell, &bounds, &mut stats);
        }
    }
    stats.spanner_rebuilds = st.spanner.rebuilds;
    stats.spanner_promotions = st.spanner.promotions;

    let result = if st.branch.len() == h {
        let depth = st.branch_diameter.iter().copied().max().unwrap_or(0);
        let w = MinorWitness::from_branch_sets(g, st.branch.clone(), Some(depth))
            .ok_or_else(|| SepError::Internal("branch sets lost pairwise adjacency".into()))?;
        SepOrMinor::MinorWitness(w)
    } else {
        let cut: Vec<VertexId> = (0..n).filter(|&v| matches!(st.side[v], Side::Minor | Side::Boundary)).collect();
        SepOrMinor::Separator(separator_from_cut(g, &cut, Ratio::TWO_THIRDS, bounds.separator)?)
    };
    Ok(ShallowOutcome {
        result,
        stats,
        branch_sets: st.branch,
    })
}

/// Grows `tree` inside the vertices allowed by `alive` by breadth-first
/// layers until it has `target` vertices or `max_layers` layers were added.
/// Returns the sorted set and the number of layers used.
pub(crate) fn pad(g: &Graph, alive: impl Fn(VertexId) -> bool, tree: &[VertexId], target: usize, max_layers: usize) -> (Vec<VertexId>, usize) {
    let mut set = tree.to_vec();
    if set.len() >= target {
        return (set, 0);
    }
    let mut seen: std::collections::HashSet<VertexId> = set.iter().copied().collect();
    let mut frontier = set.clone();
    let mut layers = 0;
    'outer: while layers < max_layers && !frontier.is_empty() {
        let mut next = Vec::new();
        layers += 1;
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if alive(v) && seen.insert(v) {
                    set.push(v);
                    next.push(v);
                    if set.len() >= target {
                        break 'outer;
                    }
                }
            }
        }
        frontier = next;
    }
    if frontier.is_empty() && layers > 0 {
        // the last pass added nothing
        layers -= 1;
    }
    set.sort_unstable();
    (set, layers)
}

/// `ℓ = max(1, round(√(n / ln n) / h))`, which balances `n/ℓ` against
/// `ℓ h² ln n`.
pub fn balanced_ell(n: usize, h: usize) -> usize {
    if n < 3 {
        return 1;
    }
    let nf = n as f64;
    ((nf / nf.ln()).sqrt() / h as f64).round().max(1.0) as usize
}

/// Separator of size `O(h √(n log n))` or a clique minor.
pub fn shallow_separator_balanced(g: &Graph, h: usize, eps: f64, seed: u64) -> Result<ShallowOutcome> {
    let mut p = ShallowParams::new(h, balanced_ell(g.n(), h));
    p.eps = eps;
    p.seed = seed;
    shallow_separator(g, &p)
}
