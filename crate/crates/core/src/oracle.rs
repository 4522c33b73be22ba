//! Exhaustive ground-truth solvers for small graphs.

use crate::certificates::{MinorWitness, Ratio, Separator};
use crate::error::{Result, SepError};
use crate::graph::Graph;

pub const MAX_SEPARATOR_ORACLE_N: usize = 16;
pub const MAX_MINOR_ORACLE_N: usize = 10;
pub const MAX_MINOR_ORACLE_H: usize = 4;

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect()
}

/// Components of the vertex set `alive` (bitmask), as masks.
fn mask_components(adj: &[u32], alive: u32) -> Vec<u32> {
    let mut left = alive;
    let mut out = Vec::new();
    while left != 0 {
        let s = left.trailing_zeros();
        let mut comp = 1u32 << s;
        let mut frontier = comp;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & alive & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        left &= !comp;
        out.push(comp);
    }
    out
}

fn mask_weight(g: &Graph, mask: u32) -> u64 {
    let mut m = mask;
    let mut w = 0;
    while m != 0 {
        w += g.vertex_weight(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    w
}

fn mask_to_vec(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Finds a minimum-cardinality balanced separator by enumerating candidate
/// separators in order of size.
pub fn brute_force_min_separator(g: &Graph, balance: Ratio) -> Result<Option<Separator>> {
    let n = g.n();
    if n > MAX_SEPARATOR_ORACLE_N {
        return Err(SepError::OracleGuard(format!(
            "separator oracle needs n <= {MAX_SEPARATOR_ORACLE_N}, got {n}"
        )));
    }
    let adj = adjacency_masks(g);
    let total = g.total_vertex_weight();
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    for size in 0..=n {
        let mut found = None;
        for_each_subset_of_size(n, size, |c| {
            let comps = mask_components(&adj, full & !c);
            let k = comps.len();
            if k > 24 {
                return false;
            }
            let weights: Vec<u64> = comps.iter().map(|&m| mask_weight(g, m)).collect();
            let rest: u64 = weights.iter().sum();
            for pick in 0u32..1 << k {
                let wa: u64 = (0..k).filter(|&i| pick >> i & 1 == 1).map(|i| weights[i]).sum();
                if balance.admits(wa, total) && balance.admits(rest - wa, total) {
                    let a = (0..k).filter(|&i| pick >> i & 1 == 1).fold(0, |m, i| m | comps[i]);
                    let b = (full & !c) & !a;
                    found = Some(Separator {
                        separator: mask_to_vec(c),
                        a: mask_to_vec(a),
                        b: mask_to_vec(b),
                        balance,
                        claimed_bound: size as u64,
                    });
                    return true;
                }
            }
            false
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Calls `f` on every `size`-subset of `0..n` in colexicographic order until it
/// returns `true`.
fn for_each_subset_of_size(n: usize, size: usize, mut f: impl FnMut(u32) -> bool) {
    if size == 0 {
        f(0);
        return;
    }
    if size > n {
        return;
    }
    let mut s: u32 = (1u32 << size) - 1;
    let limit: u64 = 1u64 << n;
    while (s as u64) < limit {
        if f(s) {
            return;
        }
        // Gosper's hack
        let c = s & s.wrapping_neg();
        let r = s + c;
        if r == 0 {
            return;
        }
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// Searches all families of `h` disjoint connected vertex sets for one with an
/// edge between every pair.
pub fn brute_force_minor_detect(g: &Graph, h: usize) -> Result<Option<MinorWitness>> {
    let n = g.n();
    if n > MAX_MINOR_ORACLE_N || h > MAX_MINOR_ORACLE_H {
        return Err(SepError::OracleGuard(format!(
            "minor oracle needs n <= {MAX_MINOR_ORACLE_N} and h <= {MAX_MINOR_ORACLE_H}, got n = {n}, h = {h}"
        )));
    }
    if h == 0 {
        return Ok(Some(MinorWitness {
            branch_sets: vec![],
            depth_bound: None,
            connecting_edges: vec![],
        }));
    }
    if h > n {
        return Ok(None);
    }
    let adj = adjacency_masks(g);
    let nbr = |m: u32| {
        let mut x = m;
        let mut out = 0;
        while x != 0 {
            out |= adj[x.trailing_zeros() as usize];
            x &= x - 1;
        }
        out & !m
    };
    let full: u32 = (1u32 << n) - 1;
    // connected subsets, grouped by lowest vertex
    let mut connected: Vec<u32> = (1..=full).filter(|&m| mask_components(&adj, m).len() == 1).collect();
    connected.sort_by_key(|m| (m.trailing_zeros(), m.count_ones(), *m));
    let neighborhoods: Vec<u32> = connected.iter().map(|&m| nbr(m)).collect();

    fn search(
        chosen: &mut Vec<(u32, u32)>,
        used: u32,
        h: usize,
        full: u32,
        adj: &[u32],
        connected: &[u32],
        nbhd: &[u32],
    ) -> bool {
        if chosen.len() + 1 == h {
            // the last set can be any component of the unused vertices
            // touching every chosen set
            for comp in mask_components(adj, full & !used) {
                if chosen.iter().all(|&(_, nb)| nb & comp != 0) {
                    // shrink is unnecessary for a valid witness
                    chosen.push((comp, 0));
                    return true;
                }
            }
            return false;
        }
        let min_low = chosen.last().map_or(0, |&(m, _)| m.trailing_zeros() + 1);
        for (idx, &m) in connected.iter().enumerate() {
            if m.trailing_zeros() < min_low || m & used != 0 {
                continue;
            }
            if !chosen.iter().all(|&(_, nb)| nb & m != 0) {
                continue;
            }
            chosen.push((m, nbhd[idx]));
            if search(chosen, used | m, h, full, adj, connected, nbhd) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen = Vec::with_capacity(h);
    if !search(&mut chosen, 0, h, full, &adj, &connected, &neighborhoods) {
        return Ok(None);
    }
    let sets = chosen.iter().map(|&(m, _)| mask_to_vec(m)).collect();
    Ok(MinorWitness::from_branch_sets(g, sets, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{verify_minor_witness, verify_separator};

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
    fn min_separator_examples() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = brute_force_min_separator(&p4, Ratio::TWO_THIRDS).unwrap().unwrap();
        assert_eq!(s.size(), 1);
        assert!(verify_separator(&p4, &s).ok);
        // removing two vertices leaves a triangle of weight 3, and 3 * 3 <= 2 * 5
        let k5 = complete(5);
        assert_eq!(brute_force_min_separator(&k5, Ratio::TWO_THIRDS).unwrap().unwrap().size(), 2);
        // a lone vertex of weight 1 is heavier than 2/3 of the total on either side
        let single = Graph::empty(1);
        assert_eq!(brute_force_min_separator(&single, Ratio::TWO_THIRDS).unwrap().unwrap().size(), 1);
        let zero = single.with_vertex_weights(vec![0]).unwrap();
        assert_eq!(brute_force_min_separator(&zero, Ratio::TWO_THIRDS).unwrap().unwrap().size(), 0);
        assert!(brute_force_min_separator(&Graph::empty(17), Ratio::TWO_THIRDS).is_err());
    }

    #[test]
    fn minor_examples() {
        let k4 = complete(4);
        let w = brute_force_minor_detect(&k4, 4).unwrap().unwrap();
        assert!(verify_minor_witness(&k4, &w, 4).ok);
        let tree = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 3), (1, 4)]).unwrap();
        assert!(brute_force_minor_detect(&tree, 3).unwrap().is_none());
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let w = brute_force_minor_detect(&c4, 3).unwrap().unwrap();
        assert!(verify_minor_witness(&c4, &w, 3).ok);
        assert!(brute_force_minor_detect(&c4, 4).unwrap().is_none());
        assert!(brute_force_minor_detect(&complete(11), 3).is_err());
    }

    #[test]
    fn petersen_has_k5_minor_but_oracle_is_capped() {
        // h = 5 exceeds the guard; the K4 check still runs
        let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
        let inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        let e: Vec<_> = outer.iter().chain(&spokes).chain(&inner).copied().collect();
        let p = Graph::from_edges(10, &e).unwrap();
        assert!(brute_force_minor_detect(&p, 4).unwrap().is_some());
        let sets = (0..5).map(|i| vec![i, i + 5]).collect();
        let w = MinorWitness::from_branch_sets(&p, sets, Some(1)).unwrap();
        assert!(verify_minor_witness(&p, &w, 5).ok);
    }
}
