//! Deterministic instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SepError};
use crate::graph::{Graph, GraphBuilder, VertexId};

/// A generator and its parameters. Textual form: `grid:32`,
/// `random-regular:1000:3`, `planted-minor:200:6`, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GenSpec {
    Grid { k: usize },
    Torus { k: usize },
    RandomRegular { n: usize, d: usize },
    PlantedMinor { n: usize, h: usize },
    Path { n: usize },
    BinaryTree { depth: usize },
    RandomTree { n: usize },
    Complete { n: usize },
    CliqueBlowup { h: usize, t: usize },
}

impl std::fmt::Display for GenSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenSpec::Grid { k } => write!(f, "grid:{k}"),
            GenSpec::Torus { k } => write!(f, "torus:{k}"),
            GenSpec::RandomRegular { n, d } => write!(f, "random-regular:{n}:{d}"),
            GenSpec::PlantedMinor { n, h } => write!(f, "planted-minor:{n}:{h}"),
            GenSpec::Path { n } => write!(f, "path:{n}"),
            GenSpec::BinaryTree { depth } => write!(f, "binary-tree:{depth}"),
            GenSpec::RandomTree { n } => write!(f, "random-tree:{n}"),
            GenSpec::Complete { n } => write!(f, "complete:{n}"),
            GenSpec::CliqueBlowup { h, t } => write!(f, "clique-blowup:{h}:{t}"),
        }
    }
}

impl std::str::FromStr for GenSpec {
    type Err = SepError;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([':', ' ']).filter(|p| !p.is_empty()).collect();
        let bad = || SepError::InvalidParameter(format!("bad generator spec {s:?}"));
        let num = |i: usize| -> Result<usize> { parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let arity = |k: usize| if parts.len() == k + 1 { Ok(()) } else { Err(bad()) };
        let spec = match parts.first().copied() {
            Some("grid") => GenSpec::Grid { k: num(1)? },
            Some("torus") => GenSpec::Torus { k: num(1)? },
            Some("random-regular") => {
                arity(2)?;
                GenSpec::RandomRegular { n: num(1)?, d: num(2)? }
            }
            Some("planted-minor") => {
                arity(2)?;
                GenSpec::PlantedMinor { n: num(1)?, h: num(2)? }
            }
            Some("path") => GenSpec::Path { n: num(1)? },
            Some("binary-tree") => GenSpec::BinaryTree { depth: num(1)? },
            Some("random-tree") => GenSpec::RandomTree { n: num(1)? },
            Some("complete") => GenSpec::Complete { n: num(1)? },
            Some("clique-blowup") => {
                arity(2)?;
                GenSpec::CliqueBlowup { h: num(1)?, t: num(2)? }
            }
            _ => return Err(bad()),
        };
        match spec {
            GenSpec::Grid { .. } | GenSpec::Torus { .. } | GenSpec::Path { .. } | GenSpec::BinaryTree { .. } | GenSpec::RandomTree { .. } | GenSpec::Complete { .. } => arity(1)?,
            _ => {}
        }
        Ok(spec)
    }
}

/// A generated graph; planted generators also return their branch sets.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    pub planted: Option<Vec<Vec<VertexId>>>,
}

pub fn generate(spec: &GenSpec, seed: u64) -> Result<Generated> {
    let plain = |graph| Generated { graph, planted: None };
    Ok(match *spec {
        GenSpec::Grid { k } => plain(grid(k, k)),
        GenSpec::Torus { k } => plain(torus(k)?),
        GenSpec::RandomRegular { n, d } => plain(random_regular(n, d, seed)?),
        GenSpec::PlantedMinor { n, h } => {
            let (graph, sets) = planted_minor(n, h, seed)?;
            Generated { graph, planted: Some(sets) }
        }
        GenSpec::Path { n } => plain(path(n)),
        GenSpec::BinaryTree { depth } => plain(binary_tree(depth)?),
        GenSpec::RandomTree { n } => plain(random_tree(n, seed)),
        GenSpec::Complete { n } => plain(complete(n)),
        GenSpec::CliqueBlowup { h, t } => {
            let (graph, sets) = clique_blowup(h, t, seed)?;
            Generated { graph, planted: Some(sets) }
        }
    })
}

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
    let mut b = GraphBuilder::new(n);
    for (u, v) in edges {
        b.add_edge(u, v).expect("generator produced an invalid edge");
    }
    b.build().expect("generator produced an invalid graph")
}

pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut e = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                e.push((v, v + 1));
            }
            if r + 1 < rows {
                e.push((v, v + cols));
            }
        }
    }
    build(rows * cols, e)
}

pub fn torus(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(SepError::InvalidParameter(format!("torus needs k >= 3, got {k}")));
    }
    let mut e = Vec::with_capacity(2 * k * k);
    for r in 0..k {
        for c in 0..k {
            let v = r * k + c;
            e.push((v, r * k + (c + 1) % k));
            e.push((v, ((r + 1) % k) * k + c));
        }
    }
    Ok(build(k * k, e))
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|v| (v - 1, v)))
}

pub fn complete(n: usize) -> Graph {
    build(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

pub fn binary_tree(depth: usize) -> Result<Graph> {
    if depth > 24 {
        return Err(SepError::InvalidParameter(format!("binary tree depth {depth} too large")));
    }
    let n = (1usize << (depth + 1)) - 1;
    Ok(build(n, (1..n).map(|v| ((v - 1) / 2, v))))
}

pub fn random_tree(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(n, (1..n).map(|v| (rng.gen_range(0..v), v)))
}

/// Uniform-ish simple d-regular graph: random pairing of half-edges, rejecting
/// loops and parallel pairs, restarting when stuck.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(SepError::InvalidParameter(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'restart: for _ in 0..1000 {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        let mut edges = Vec::with_capacity(n * d / 2);
        while !points.is_empty() {
            let len = points.len();
            let mut paired = false;
            for _ in 0..64 {
                let i = rng.gen_range(0..len);
                let j = rng.gen_range(0..len);
                let (u, v) = (points[i], points[j]);
                if i != j && u != v && !adj[u].contains(&v) {
                    let (hi, lo) = (i.max(j), i.min(j));
                    points.swap_remove(hi);
                    points.swap_remove(lo);
                    adj[u].push(v);
                    adj[v].push(u);
                    edges.push((u, v));
                    paired = true;
                    break;
                }
            }
            if !paired {
                let any = (0..len).any(|i| (i + 1..len).any(|j| points[i] != points[j] && !adj[points[i]].contains(&points[j])));
                if !any {
                    continue 'restart;
                }
            }
        }
        return Ok(build(n, edges));
    }
    Err(SepError::Internal("random regular generator did not converge".into()))
}

/// Appends `h` random trees of `blob` vertices each (ids from 0) joined by one
/// random edge per pair.
fn clique_of_blobs(h: usize, blob: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<(usize, usize)>) -> Vec<Vec<VertexId>> {
    let sets: Vec<Vec<VertexId>> = (0..h).map(|i| (i * blob..(i + 1) * blob).collect()).collect();
    for s in &sets {
        for v in 1..blob {
            edges.push((s[rng.gen_range(0..v)], s[v]));
        }
    }
    for i in 0..h {
        for j in i + 1..h {
            edges.push((*sets[i].choose(rng).unwrap(), *sets[j].choose(rng).unwrap()));
        }
    }
    sets
}

/// `h` random connected blobs with one edge between every pair, padded with a
/// grid attached to the first blob. Returns the blobs as branch sets.
pub fn planted_minor(n: usize, h: usize, seed: u64) -> Result<(Graph, Vec<Vec<VertexId>>)> {
    if h == 0 || n < h {
        return Err(SepError::InvalidParameter(format!("planted minor needs 1 <= h <= n, got n = {n}, h = {h}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blob = (n / (2 * h)).max(1);
    let mut edges = Vec::new();
    let sets = clique_of_blobs(h, blob, &mut rng, &mut edges);
    let start = h * blob;
    let rest = n - start;
    if rest > 0 {
        let cols = (rest as f64).sqrt().ceil() as usize;
        for i in 0..rest {
            let v = start + i;
            if i % cols != 0 {
                edges.push((v - 1, v));
            }
            if i >= cols {
                edges.push((v - cols, v));
            }
        }
        edges.push((*sets[0].choose(&mut rng).unwrap(), start));
    }
    Ok((build(n, edges), sets))
}

/// K_h with every vertex replaced by a random tree on `t` vertices.
pub fn clique_blowup(h: usize, t: usize, seed: u64) -> Result<(Graph, Vec<Vec<VertexId>>)> {
    if t == 0 {
        return Err(SepError::InvalidParameter("blob size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let sets = clique_of_blobs(h, t, &mut rng, &mut edges);
    Ok((build(h * t, edges), sets))
}
