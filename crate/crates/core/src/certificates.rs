//! Certificates produced by the separator algorithms and their independent
//! verifiers.
//!
//! Every algorithm in this crate returns a [`SepOrMinor`]. A certificate is
//! self-contained: it carries the sets it talks about, so a verifier only
//! needs the host graph.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SepError};
use crate::graph::{DensityCertificate, Graph, VertexId};

/// Balance constant `num / den`; both sides of a separator must weigh at most
/// this fraction of `w(V)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const TWO_THIRDS: Ratio = Ratio { num: 2, den: 3 };

    /// `part <= num/den * total`, by cross-multiplication.
    #[inline]
    pub fn admits(&self, part: u64, total: u64) -> bool {
        part as u128 * self.den as u128 <= total as u128 * self.num as u128
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio::TWO_THIRDS
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub separator: Vec<VertexId>,
    pub a: Vec<VertexId>,
    pub b: Vec<VertexId>,
    pub balance: Ratio,
    pub claimed_bound: u64,
}

impl Separator {
    pub fn size(&self) -> usize {
        self.separator.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectingEdge {
    pub i: usize,
    pub j: usize,
    pub u: VertexId,
    pub v: VertexId,
}

/// Branch sets of a K_h minor, one G-edge per pair of branch sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub branch_sets: Vec<Vec<VertexId>>,
    pub depth_bound: Option<u64>,
    pub connecting_edges: Vec<ConnectingEdge>,
}

impl MinorWitness {
    pub fn h(&self) -> usize {
        self.branch_sets.len()
    }

    /// Builds a witness from branch sets, locating one connecting edge per
    /// pair. Returns `None` when some pair is not adjacent.
    pub fn from_branch_sets(g: &Graph, mut sets: Vec<Vec<VertexId>>, depth_bound: Option<u64>) -> Option<MinorWitness> {
        for s in &mut sets {
            s.sort_unstable();
        }
        let mut owner = vec![usize::MAX; g.n()];
        for (i, s) in sets.iter().enumerate() {
            for &v in s {
                owner[v] = i;
            }
        }
        let h = sets.len();
        let mut found: Vec<Option<(VertexId, VertexId)>> = vec![None; h * h];
        for (i, s) in sets.iter().enumerate() {
            for &u in s {
                for &v in g.neighbors(u) {
                    let j = owner[v];
                    if j != usize::MAX && j > i && found[i * h + j].is_none() {
                        found[i * h + j] = Some((u, v));
                    }
                }
            }
        }
        let mut connecting_edges = Vec::new();
        for i in 0..h {
            for j in i + 1..h {
                let (u, v) = found[i * h + j]?;
                connecting_edges.push(ConnectingEdge { i, j, u, v });
            }
        }
        Some(MinorWitness {
            branch_sets: sets,
            depth_bound,
            connecting_edges,
        })
    }
}

/// A dense minor of G: contracting each (connected, disjoint) group and
/// deleting everything else yields a simple graph whose edge count exceeds the
/// certificate's threshold, so G has a K_h minor. A plain subgraph is the case
/// of singleton groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorReport {
    pub certificate: DensityCertificate,
    pub groups: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SepOrMinor {
    Separator(Separator),
    MinorWitness(MinorWitness),
    DensityCertificate(DensityCertificate),
    MinorReport(MinorReport),
}

impl SepOrMinor {
    pub fn is_separator(&self) -> bool {
        matches!(self, SepOrMinor::Separator(_))
    }

    pub fn is_minor_side(&self) -> bool {
        !self.is_separator()
    }

    pub fn separator(&self) -> Option<&Separator> {
        match self {
            SepOrMinor::Separator(s) => Some(s),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&MinorWitness> {
        match self {
            SepOrMinor::MinorWitness(w) => Some(w),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SepOrMinor::Separator(_) => "separator",
            SepOrMinor::MinorWitness(_) => "minor-witness",
            SepOrMinor::DensityCertificate(_) => "density-certificate",
            SepOrMinor::MinorReport(_) => "minor-report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    fn new() -> Self {
        VerifyReport { ok: true, violations: Vec::new() }
    }

    fn fail(&mut self, rule: &str, detail: impl Into<String>) {
        self.ok = false;
        self.violations.push(Violation {
            rule: rule.to_string(),
            detail: detail.into(),
        });
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "[{}] {}", v.rule, v.detail)?;
        }
        Ok(())
    }
}

pub fn verify_separator(g: &Graph, s: &Separator) -> VerifyReport {
    let mut rep = VerifyReport::new();
    let n = g.n();
    // 0 = unassigned, 1 = C, 2 = A, 3 = B
    let mut side = vec![0u8; n];
    for (tag, set, name) in [(1u8, &s.separator, "C"), (2, &s.a, "A"), (3, &s.b, "B")] {
        for &v in set.iter() {
            if v >= n {
                rep.fail("range", format!("{name} contains vertex {v} >= n = {n}"));
                continue;
            }
            if side[v] != 0 {
                rep.fail("partition", format!("vertex {v} appears in more than one part"));
            }
            side[v] = tag;
        }
    }
    if let Some(v) = side.iter().position(|&t| t == 0) {
        let missing = side.iter().filter(|&&t| t == 0).count();
        rep.fail("partition", format!("{missing} vertices unassigned (first: {v})"));
    }
    for &(u, v) in g.edges() {
        if (side[u] == 2 && side[v] == 3) || (side[u] == 3 && side[v] == 2) {
            rep.fail("crossing-edge", format!("edge {u}-{v} joins A and B"));
            break;
        }
    }
    let total = g.total_vertex_weight();
    let wa: u64 = s.a.iter().filter(|&&v| v < n).map(|&v| g.vertex_weight(v)).sum();
    let wb: u64 = s.b.iter().filter(|&&v| v < n).map(|&v| g.vertex_weight(v)).sum();
    if s.balance.den == 0 || s.balance.num >= s.balance.den {
        rep.fail("balance", format!("balance {}/{} is not a constant below 1", s.balance.num, s.balance.den));
    }
    if !s.balance.admits(wa, total) {
        rep.fail("balance", format!("w(A) = {wa} exceeds {}/{} of {total}", s.balance.num, s.balance.den));
    }
    if !s.balance.admits(wb, total) {
        rep.fail("balance", format!("w(B) = {wb} exceeds {}/{} of {total}", s.balance.num, s.balance.den));
    }
    if s.separator.len() as u64 > s.claimed_bound {
        rep.fail("bound", format!("|C| = {} exceeds claimed bound {}", s.separator.len(), s.claimed_bound));
    }
    rep
}

/// Exact diameter of `g[set]` (`None` when disconnected).
pub fn induced_diameter(g: &Graph, set: &[VertexId]) -> Option<usize> {
    let mut local = std::collections::HashMap::with_capacity(set.len());
    for (i, &v) in set.iter().enumerate() {
        local.insert(v, i);
    }
    let mut best = 0;
    let mut dist = vec![usize::MAX; set.len()];
    let mut q = VecDeque::new();
    for s in 0..set.len() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        q.clear();
        q.push_back(s);
        let mut seen = 1;
        while let Some(i) = q.pop_front() {
            for &w in g.neighbors(set[i]) {
                if let Some(&j) = local.get(&w) {
                    if dist[j] == usize::MAX {
                        dist[j] = dist[i] + 1;
                        best = best.max(dist[j]);
                        seen += 1;
                        q.push_back(j);
                    }
                }
            }
        }
        if seen != set.len() {
            return None;
        }
    }
    Some(best)
}

fn is_connected_set(g: &Graph, set: &[VertexId], mark: &mut [u32], stamp: u32) -> bool {
    if set.is_empty() {
        return false;
    }
    for &v in set {
        mark[v] = stamp;
    }
    let mut stack = vec![set[0]];
    mark[set[0]] = stamp + 1;
    let mut seen = 1;
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if mark[w] == stamp {
                mark[w] = stamp + 1;
                seen += 1;
                stack.push(w);
            }
        }
    }
    seen == set.len()
}

pub fn verify_minor_witness(g: &Graph, w: &MinorWitness, h: usize) -> VerifyReport {
    let mut rep = VerifyReport::new();
    let n = g.n();
    if w.branch_sets.len() != h {
        rep.fail("count", format!("{} branch sets, expected {h}", w.branch_sets.len()));
    }
    let mut owner = vec![usize::MAX; n];
    let mut clean = true;
    for (i, s) in w.branch_sets.iter().enumerate() {
        if s.is_empty() {
            rep.fail("connected", format!("branch set {i} is empty"));
            clean = false;
        }
        for &v in s {
            if v >= n {
                rep.fail("range", format!("branch set {i} contains {v} >= n"));
                clean = false;
                continue;
            }
            if owner[v] != usize::MAX {
                rep.fail("disjoint", format!("vertex {v} in branch sets {} and {i}", owner[v]));
                clean = false;
            }
            owner[v] = i;
        }
    }
    if !clean {
        return rep;
    }
    let mut mark = vec![0u32; n];
    for (i, s) in w.branch_sets.iter().enumerate() {
        let stamp = 2 * i as u32 + 1;
        if !is_connected_set(g, s, &mut mark, stamp) {
            rep.fail("connected", format!("branch set {i} does not induce a connected subgraph"));
        }
    }
    let k = w.branch_sets.len();
    let mut covered: HashSet<(usize, usize)> = HashSet::new();
    for e in &w.connecting_edges {
        let ok = e.u < n
            && e.v < n
            && owner[e.u] == e.i
            && owner[e.v] == e.j
            && g.has_edge(e.u, e.v);
        if ok {
            covered.insert((e.i.min(e.j), e.i.max(e.j)));
        } else {
            rep.fail("pair-edge", format!("recorded edge {}-{} does not join branch sets {} and {}", e.u, e.v, e.i, e.j));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            if !covered.contains(&(i, j)) {
                rep.fail("pair-edge", format!("no connecting edge recorded for branch sets {i} and {j}"));
            }
        }
    }
    if let Some(limit) = w.depth_bound {
        for (i, s) in w.branch_sets.iter().enumerate() {
            if let Some(d) = induced_diameter(g, s) {
                if d as u64 > limit {
                    rep.fail("diameter", format!("branch set {i} has diameter {d} > {limit}"));
                }
            }
        }
    }
    rep
}

pub fn verify_density_certificate(g: &Graph, c: &DensityCertificate) -> VerifyReport {
    let mut rep = VerifyReport::new();
    if c.n != g.n() || c.m != g.m() {
        rep.fail("density", format!("certificate counts ({}, {}) differ from graph ({}, {})", c.n, c.m, g.n(), g.m()));
    }
    if !c.is_consistent() {
        rep.fail("density", "threshold mismatch or m does not exceed it");
    }
    rep
}

pub fn verify_minor_report(g: &Graph, r: &MinorReport) -> VerifyReport {
    let mut rep = VerifyReport::new();
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    for (i, s) in r.groups.iter().enumerate() {
        for &v in s {
            if v >= n || owner[v] != usize::MAX {
                rep.fail("disjoint", format!("group {i} vertex {v} out of range or repeated"));
                return rep;
            }
            owner[v] = i;
        }
    }
    let mut mark = vec![0u32; n];
    for (i, s) in r.groups.iter().enumerate() {
        if !is_connected_set(g, s, &mut mark, 2 * i as u32 + 1) {
            rep.fail("connected", format!("group {i} is not connected"));
        }
    }
    let mut quotient: HashSet<(usize, usize)> = HashSet::new();
    for &(u, v) in g.edges() {
        let (a, b) = (owner[u], owner[v]);
        if a != usize::MAX && b != usize::MAX && a != b {
            quotient.insert((a.min(b), a.max(b)));
        }
    }
    if r.certificate.n != r.groups.len() || r.certificate.m != quotient.len() {
        rep.fail(
            "density",
            format!(
                "certificate counts ({}, {}) differ from the minor ({}, {})",
                r.certificate.n,
                r.certificate.m,
                r.groups.len(),
                quotient.len()
            ),
        );
    }
    if !r.certificate.is_consistent() {
        rep.fail("density", "threshold mismatch or m does not exceed it");
    }
    rep
}

/// Dispatches to the verifier matching the certificate variant.
pub fn verify(g: &Graph, out: &SepOrMinor, h: usize) -> VerifyReport {
    match out {
        SepOrMinor::Separator(s) => verify_separator(g, s),
        SepOrMinor::MinorWitness(w) => verify_minor_witness(g, w, h),
        SepOrMinor::DensityCertificate(c) => {
            let mut rep = verify_density_certificate(g, c);
            if c.h != h {
                rep.fail("density", format!("certificate is for h = {}, expected {h}", c.h));
            }
            rep
        }
        SepOrMinor::MinorReport(r) => {
            let mut rep = verify_minor_report(g, r);
            if r.certificate.h != h {
                rep.fail("density", format!("certificate is for h = {}, expected {h}", r.certificate.h));
            }
            rep
        }
    }
}

/// Turns a vertex set `C` into a separator certificate by packing the
/// components of `G - C` into two sides. Fails when some component is heavier
/// than `balance * w(V)`, in which case no packing exists.
pub fn separator_from_cut(g: &Graph, cut: &[VertexId], balance: Ratio, claimed_bound: u64) -> Result<Separator> {
    let n = g.n();
    let mut in_cut = vec![false; n];
    for &v in cut {
        in_cut[v] = true;
    }
    let comps = g.components_where(|v| !in_cut[v]);
    let total = g.total_vertex_weight();
    let mut weighted: Vec<(u64, usize)> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| (c.iter().map(|&v| g.vertex_weight(v)).sum(), i))
        .collect();
    weighted.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    if let Some(&(w, _)) = weighted.first() {
        if !balance.admits(w, total) {
            return Err(SepError::Contract(format!(
                "component of weight {w} exceeds {}/{} of {total}",
                balance.num, balance.den
            )));
        }
    }
    // Fill A until it reaches (1 - balance) of the total; the remainder then
    // fits under the balance as well.
    let slack = Ratio { num: balance.den - balance.num, den: balance.den };
    let mut a_parts = Vec::new();
    let mut b_parts = Vec::new();
    let mut wa = 0u64;
    for &(w, i) in &weighted {
        let reached = !slack.admits(wa, total) || (wa as u128 * slack.den as u128 == total as u128 * slack.num as u128 && wa > 0);
        if !reached && balance.admits(wa + w, total) {
            wa += w;
            a_parts.push(i);
        } else {
            b_parts.push(i);
        }
    }
    let mut a: Vec<VertexId> = a_parts.iter().flat_map(|&i| comps[i].iter().copied()).collect();
    let mut b: Vec<VertexId> = b_parts.iter().flat_map(|&i| comps[i].iter().copied()).collect();
    a.sort_unstable();
    b.sort_unstable();
    let wb: u64 = b.iter().map(|&v| g.vertex_weight(v)).sum();
    if !balance.admits(wb, total) {
        // greedy packing failed; fall back to exhaustive search over few parts
        if weighted.len() <= 20 {
            if let Some(mask) = exact_packing(&weighted, total, balance) {
                a.clear();
                b.clear();
                for (k, &(_, i)) in weighted.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        a.extend(comps[i].iter().copied());
                    } else {
                        b.extend(comps[i].iter().copied());
                    }
                }
                a.sort_unstable();
                b.sort_unstable();
            } else {
                return Err(SepError::Contract("no balanced packing of components".into()));
            }
        } else {
            return Err(SepError::Contract("greedy packing of components failed".into()));
        }
    }
    let mut c = cut.to_vec();
    c.sort_unstable();
    c.dedup();
    Ok(Separator {
        separator: c,
        a,
        b,
        balance,
        claimed_bound,
    })
}

fn exact_packing(parts: &[(u64, usize)], total: u64, balance: Ratio) -> Option<u64> {
    let k = parts.len();
    (0u64..1 << k).find(|&mask| {
        let wa: u64 = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| parts[i].0).sum();
        balance.admits(wa, total) && balance.admits(total - wa, total)
    })
}

/// Weight test used for all "is this component heavy" decisions: `w > 2/3 W`.
#[inline]
pub fn heavier_than_two_thirds(w: u64, total: u64) -> bool {
    3 * w as u128 > 2 * total as u128
}
