//! Acceptance run: one pass/fail line per criterion. Criteria 1-8 gate the
//! exit status; criterion 9 is informational and only reported.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sepkit::active::{check_c_x, complement_components_by_search, decompose_active_complement, ActiveState, ClusterIndex, VertexState};
use sepkit::approx::approx_largest_clique_minor;
use sepkit::certificates::{verify, Ratio};
use sepkit::clustering::{check_nested, nested_r_clustering, ClusterParams, Clustered, NestedClustering};
use sepkit::ddg::build_ddg;
use sepkit::generators::{self, generate, GenSpec};
use sepkit::minorfree::{balanced_minor_free_ell, balanced_separator, minor_free_separator, MinorFreeParams};
use sepkit::oracle::{brute_force_min_separator, brute_force_minor_detect};
use sepkit::paths::{floyd_warshall, INF};
use sepkit::shallow::{balanced_ell, shallow_separator, shallow_separator_balanced, ShallowParams};
use sepkit::spanner::{build_spanner, stretch_check, PairSample};
use sepkit::tradeoff::{linear_time_separator, tradeoff_separator, TradeoffParams};
use sepkit::{Graph, Parallelism, SepOrMinor};

/// Allowed growth of a calibrated constant at larger sizes.
const DRIFT: f64 = 1.25;
/// Exponent of `ln n` in the trade-off bound, fixed before measuring.
const TRADEOFF_Q: f64 = 1.0;
/// Required gap between the two time exponents.
const SLOPE_GAP: f64 = 0.1;
const CORPUS_MIN: usize = 500;
const CORPUS_BUDGET: Duration = Duration::from_secs(30 * 60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(id: usize, name: &str, o: &Outcome) {
    println!("criterion {id} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

struct Instance {
    label: String,
    graph: Graph,
    /// h values to run at.
    hs: Vec<usize>,
}

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn connected(g: &Graph) -> bool {
    g.n() > 0 && g.components_where(|_| true).len() == 1
}

fn corpus() -> Vec<Instance> {
    let mut specs: Vec<(GenSpec, u64)> = Vec::new();
    specs.extend((2..=48).map(|k| (GenSpec::Grid { k }, 0)));
    specs.extend((3..=20).map(|k| (GenSpec::Torus { k }, 0)));
    specs.extend([1, 2, 3, 4, 5, 7, 9, 12, 16, 20, 30, 50, 75, 100, 150, 200, 300, 500, 800, 1000, 2000, 5000].map(|n| (GenSpec::Path { n }, 0)));
    specs.extend((1..=11).map(|depth| (GenSpec::BinaryTree { depth }, 0)));
    for n in [10, 40, 150, 600, 2000] {
        specs.extend((0..12).map(|s| (GenSpec::RandomTree { n }, s)));
    }
    for d in 3..=6 {
        for n in [20, 50, 100, 300, 1000] {
            specs.extend((0..8).map(|s| (GenSpec::RandomRegular { n, d }, s)));
        }
    }
    for h in 4..=7 {
        for n in [60, 200, 600] {
            specs.extend((0..8).map(|s| (GenSpec::PlantedMinor { n, h }, s)));
        }
    }
    for h in 3..=7 {
        for t in 2..=5 {
            specs.extend((0..3).map(|s| (GenSpec::CliqueBlowup { h, t }, s)));
        }
    }
    specs.extend((1..=10).map(|n| (GenSpec::Complete { n }, 0)));

    let mut out: Vec<Instance> = specs
        .into_iter()
        .enumerate()
        .map(|(i, (spec, seed))| {
            let hs = match spec {
                GenSpec::PlantedMinor { h, .. } | GenSpec::CliqueBlowup { h, .. } => vec![h, h + 1],
                _ => vec![4 + i % 3],
            };
            Instance {
                label: format!("{spec}@{seed}"),
                graph: generate(&spec, seed).unwrap().graph,
                hs,
            }
        })
        .collect();
    // small random graphs, in reach of the exact oracles
    for i in 0..240u64 {
        let n = 3 + (i % 10) as usize;
        let p = [0.25, 0.4, 0.6][(i / 10 % 3) as usize];
        out.push(Instance {
            label: format!("gnp:{n}:{p}@{i}"),
            graph: gnp(n, p, i),
            hs: vec![3, 4],
        });
    }
    out
}

#[derive(Default)]
struct Tally {
    certificates: usize,
    failures: Vec<String>,
    witnesses: Vec<(usize, Graph, usize)>,
}

impl Tally {
    fn check(&mut self, label: &str, alg: &str, g: &Graph, h: usize, out: &SepOrMinor) {
        self.certificates += 1;
        let rep = verify(g, out, h);
        if !rep.ok {
            self.failures.push(format!("{alg} on {label} (h={h}): {rep}"));
        }
        if let SepOrMinor::MinorWitness(w) = out {
            if g.n() <= 10 && w.h() <= 4 {
                self.witnesses.push((w.h(), g.clone(), self.certificates));
            }
        }
    }

    fn error(&mut self, label: &str, alg: &str, e: impl std::fmt::Display) {
        self.certificates += 1;
        self.failures.push(format!("{alg} on {label}: error {e}"));
    }
}

fn default_r(n: usize, h: usize) -> usize {
    ((4.0 * ClusterParams::new(1, h).r_floor(n)).ceil() as usize).max(2)
}

/// Every algorithm on one instance; outputs go through the verifier.
fn run_all(inst: &Instance, tally: &mut Tally, violations: &mut Vec<String>, checks: &mut usize) {
    let g = &inst.graph;
    let label = &inst.label;
    let debug = g.n() <= 3000;
    for (j, &h) in inst.hs.iter().enumerate() {
        let seed = j as u64;
        macro_rules! take {
            ($alg:expr, $res:expr, $f:expr) => {
                match $res {
                    Ok(o) => {
                        #[allow(clippy::redundant_closure_call)]
                        ($f)(&o);
                        tally.check(label, $alg, g, h, &o.result);
                    }
                    Err(e) => tally.error(label, $alg, e),
                }
            };
        }
        for ell in [2, balanced_ell(g.n(), h)] {
            let mut p = ShallowParams::new(h, ell);
            p.seed = seed;
            p.check_invariants = debug;
            take!("shallow", shallow_separator(g, &p), |o: &sepkit::shallow::ShallowOutcome| {
                *checks += o.stats.invariant_checks;
                violations.extend(o.stats.violations.iter().map(|v| format!("shallow on {label}: {v}")));
            });
            // without the density guard the loop itself must find a minor or a separator
            p.guard = None;
            take!("shallow/no-guard", shallow_separator(g, &p), |o: &sepkit::shallow::ShallowOutcome| {
                *checks += o.stats.invariant_checks;
                violations.extend(o.stats.violations.iter().map(|v| format!("shallow on {label}: {v}")));
            });
        }
        take!("shallow-balanced", shallow_separator_balanced(g, h, 1.0, seed), |_| ());
        for ell in [1, balanced_minor_free_ell(g.n(), h)] {
            let mut p = MinorFreeParams::new(h, ell);
            p.seed = seed;
            p.check_invariants = debug;
            take!("minorfree", minor_free_separator(g, &p), |o: &sepkit::minorfree::MinorFreeOutcome| {
                *checks += o.stats.invariant_checks;
                violations.extend(o.stats.violations.iter().map(|v| format!("minorfree on {label}: {v}")));
            });
        }
        take!("balanced", balanced_separator(g, h, 0.5, seed), |_| ());
        let mut p = TradeoffParams::new(h, 0.8);
        p.seed = seed;
        take!("tradeoff", tradeoff_separator(g, &p), |_| ());
        p.target = Some(4);
        take!("tradeoff/target=4", tradeoff_separator(g, &p), |_| ());
        take!("linear-time", linear_time_separator(g, h, 0.1, seed), |_| ());
        if g.n() > 0 {
            let mut cp = ClusterParams::new(default_r(g.n(), h), h);
            cp.seed = seed;
            match nested_r_clustering(g, &cp) {
                Ok(Clustered::Done(nc)) => {
                    tally.certificates += 1;
                    let problems = check_nested(g, &nc);
                    tally.failures.extend(problems.into_iter().map(|p| format!("clustering on {label}: {p}")));
                }
                Ok(Clustered::Minor(m)) => tally.check(label, "clustering", g, h, &m),
                Err(e) => tally.error(label, "clustering", e),
            }
        }
    }
    if g.n() > 0 && g.n() <= 400 {
        match approx_largest_clique_minor(g, 1.0, 0) {
            Ok(r) => tally.check(label, "approx-minor", g, r.h_found, &SepOrMinor::MinorWitness(r.witness)),
            Err(e) => tally.error(label, "approx-minor", e),
        }
    }
}

struct ScalePoint {
    k: usize,
    n: usize,
    ell: usize,
    size: usize,
    secs: f64,
}

/// `best` wall time over `reps` runs of `f`, plus its last output.
fn timed<T>(reps: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        let out = f();
        best = best.min(t.elapsed().as_secs_f64());
        last = Some(out);
    }
    (last.unwrap(), best)
}

/// Grid runs shared by the scaling criteria, verified into `tally`.
fn grid_scaling(tally: &mut Tally) -> (Vec<ScalePoint>, Vec<ScalePoint>, Vec<ScalePoint>) {
    let h = 5;
    let (mut shallow, mut minorfree, mut trade) = (Vec::new(), Vec::new(), Vec::new());
    for k in [32, 64, 128, 256] {
        let g = generators::grid(k, k);
        let n = g.n();
        let label = format!("grid:{k}");
        let reps = if k <= 128 { 3 } else { 1 };
        let (out, secs) = timed(reps, || shallow_separator_balanced(&g, h, 1.0, 0).unwrap().result);
        tally.check(&label, "shallow-balanced", &g, h, &out);
        shallow.push(ScalePoint { k, n, ell: balanced_ell(n, h), size: out.separator().map_or(usize::MAX, |s| s.size()), secs });
        let (out, secs) = timed(reps.min(2), || balanced_separator(&g, h, 0.5, 0).unwrap().result);
        tally.check(&label, "balanced", &g, h, &out);
        minorfree.push(ScalePoint { k, n, ell: balanced_minor_free_ell(n, h), size: out.separator().map_or(usize::MAX, |s| s.size()), secs });
        if k >= 64 {
            let (out, secs) = timed(1, || tradeoff_separator(&g, &TradeoffParams::new(h, 0.8)).unwrap().result);
            tally.check(&label, "tradeoff", &g, h, &out);
            trade.push(ScalePoint { k, n, ell: 0, size: out.separator().map_or(usize::MAX, |s| s.size()), secs });
        }
    }
    (shallow, minorfree, trade)
}

/// Calibrates `c = |C| / bound` on the first point and checks the rest
/// against `DRIFT * c`.
fn drift(points: &[ScalePoint], bound: impl Fn(&ScalePoint) -> f64) -> Outcome {
    let ratios: Vec<f64> = points.iter().map(|p| p.size as f64 / bound(p)).collect();
    let c = ratios[0];
    let pass = points.iter().all(|p| p.size != usize::MAX) && ratios.iter().all(|&r| r <= DRIFT * c);
    let parts: Vec<String> = points.iter().zip(&ratios).map(|(p, r)| format!("k={} |C|={} c={:.3}", p.k, p.size, r)).collect();
    Outcome {
        pass,
        detail: format!("calibrated c={c:.3}, limit {:.3}; {}", DRIFT * c, parts.join(", ")),
    }
}

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_2_3(corpus: &[Instance], tally: &Tally) -> (Outcome, Outcome) {
    let mut graphs = 0;
    let mut runs = 0;
    let mut bad = Vec::new();
    for inst in corpus.iter().filter(|i| i.graph.n() <= 12 && connected(&i.graph)) {
        let g = &inst.graph;
        graphs += 1;
        let opt = match brute_force_min_separator(g, Ratio::TWO_THIRDS) {
            Ok(Some(s)) => s.size(),
            other => {
                bad.push(format!("{}: oracle gave {other:?}", inst.label));
                continue;
            }
        };
        for h in [3, 4] {
            let free = (g.n() <= 10).then(|| brute_force_minor_detect(g, h).unwrap().is_none());
            for seed in 0..3 {
                let outs = [
                    ("shallow-balanced", shallow_separator_balanced(g, h, 1.0, seed).map(|o| o.result)),
                    ("balanced", balanced_separator(g, h, 0.5, seed).map(|o| o.result)),
                ];
                for (alg, out) in outs {
                    runs += 1;
                    let out = match out {
                        Ok(o) => o,
                        Err(e) => {
                            bad.push(format!("{alg} on {}: {e}", inst.label));
                            continue;
                        }
                    };
                    if !verify(g, &out, h).ok {
                        bad.push(format!("{alg} on {} not verifier-clean", inst.label));
                    }
                    match &out {
                        SepOrMinor::Separator(s) if s.size() < opt => bad.push(format!("{alg} on {}: |C|={} below optimum {opt}", inst.label, s.size())),
                        SepOrMinor::Separator(_) => {}
                        other if free == Some(true) => bad.push(format!("{alg} on {}: {} on a K{h}-free graph", inst.label, other.kind())),
                        _ => {}
                    }
                }
            }
        }
    }
    let c2 = Outcome {
        pass: bad.is_empty() && graphs > 0,
        detail: format!("{graphs} connected graphs with n <= 12, {runs} runs, {} disagreements{}", bad.len(), first(&bad)),
    };

    let mut wrong = Vec::new();
    for (h, g, id) in &tally.witnesses {
        if brute_force_minor_detect(g, *h).unwrap().is_none() {
            wrong.push(format!("certificate #{id}: K{h} witness on a K{h}-free graph"));
        }
    }
    let c3 = Outcome {
        pass: wrong.is_empty() && !tally.witnesses.is_empty(),
        detail: format!("{} witnesses with n <= 10, h <= 4 checked against exhaustive search, {} disagreements{}", tally.witnesses.len(), wrong.len(), first(&wrong)),
    };
    (c2, c3)
}

/// Distinct messages with the numbers blanked out.
fn kinds(v: &[String]) -> String {
    let mut k: Vec<String> = v.iter().map(|m| m.split(": ").skip(2).collect::<Vec<_>>().join(": ").replace(|c: char| c.is_ascii_digit(), "#")).collect();
    k.sort();
    k.dedup();
    if k.is_empty() {
        String::new()
    } else {
        format!(" of {} kinds [{}]", k.len(), k.join(" | "))
    }
}

fn first(v: &[String]) -> String {
    v.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

/// Distances in cluster `c` between local vertices, through interior
/// vertices and the two endpoints only.
fn cluster_distances(g: &Graph, nc: &NestedClustering, idx: &ClusterIndex, id: usize, u: usize, v: usize) -> u64 {
    let c = &nc.clusters[id];
    let adj = c.local_adjacency(g);
    let k = c.vertices.len();
    let keep = |x: usize| x == u || x == v || !idx.csr[id].is_boundary[x];
    let mut d = vec![vec![INF; k]; k];
    for i in 0..k {
        d[i][i] = 0;
        if keep(i) {
            for &j in &adj[i] {
                if keep(j as usize) {
                    d[i][j as usize] = 1;
                }
            }
        }
    }
    floyd_warshall(d)[u][v]
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    // distance graphs against Floyd-Warshall
    let mut clusters = 0;
    let mut pairs = 0;
    let graphs: Vec<(String, Graph)> = vec![
        ("grid:12".into(), generators::grid(12, 12)),
        ("grid:20".into(), generators::grid(20, 20)),
        ("torus:14".into(), generators::torus(14).unwrap()),
        ("random-regular:200:3".into(), generators::random_regular(200, 3, 1).unwrap()),
        ("random-tree:300".into(), generators::random_tree(300, 2)),
    ];
    for (label, g) in &graphs {
        let r = default_r(g.n(), 5).min(g.n() / 4).max(8);
        let Some(nc) = nested_r_clustering(g, &ClusterParams::new(r, 5)).unwrap().done() else {
            bad.push(format!("{label}: clustering met a minor"));
            continue;
        };
        let idx = ClusterIndex::new(g, &nc, Parallelism::Sequential);
        for c in nc.clusters.iter().filter(|c| c.vertices.len() <= 100 && !c.boundary.is_empty()) {
            clusters += 1;
            let d = build_ddg(&nc, &idx, c.id);
            let local: Vec<usize> = c.boundary.iter().map(|&v| c.local_index(v).unwrap()).collect();
            for (i, &u) in local.iter().enumerate() {
                for (j, &v) in local.iter().enumerate() {
                    pairs += 1;
                    let want = cluster_distances(g, &nc, &idx, c.id, u, v);
                    if d.d(i, j) != want {
                        bad.push(format!("{label} cluster {} pair ({u},{v}): {} vs {want}", c.id, d.d(i, j)));
                    }
                }
            }
        }
    }
    // spanner stretch, every pair
    let mut spanners = 0;
    for n in [20, 60, 120, 200] {
        for (i, p) in [0.05, 0.15, 0.4].into_iter().enumerate() {
            let g = gnp(n, p, (n + i) as u64);
            for k in 1..=4 {
                spanners += 1;
                let s = build_spanner(&g, k, k as u64);
                let rep = stretch_check(&g, &s, &PairSample::All);
                if rep.disconnected > 0 || rep.max_ratio > (2 * k - 1) as f64 + 1e-9 {
                    bad.push(format!("spanner n={n} p={p} k={k}: stretch {:.3}, {} pairs cut", rep.max_ratio, rep.disconnected));
                }
            }
        }
    }
    for k in [10, 14] {
        let g = generators::grid(k, k);
        for kk in 1..=3 {
            spanners += 1;
            let rep = stretch_check(&g, &build_spanner(&g, kk, 7), &PairSample::All);
            if rep.disconnected > 0 || rep.max_ratio > (2 * kk - 1) as f64 + 1e-9 {
                bad.push(format!("spanner grid:{k} k={kk}: stretch {:.3}", rep.max_ratio));
            }
        }
    }
    // incremental complement components against plain search
    let mut flips = 0;
    let bases = [generators::grid(12, 12), generators::random_regular(150, 3, 5).unwrap(), generators::random_tree(200, 3)];
    for seq in 0..100u64 {
        let g = &bases[(seq % 3) as usize];
        let nc = nested_r_clustering(g, &ClusterParams::new(24, 5)).unwrap().done().unwrap();
        let idx = ClusterIndex::new(g, &nc, Parallelism::Sequential);
        let mut st = ActiveState::new(g, &nc, &idx, g.n(), Parallelism::Sequential);
        let mut rng = ChaCha8Rng::seed_from_u64(seq);
        for _ in 0..30 {
            let v = rng.gen_range(0..g.n());
            let to = if st.is_active(v) { VertexState::Passive } else { VertexState::Active };
            if st.set_vertex_state(g, &nc, &idx, v, to).is_err() {
                continue;
            }
            flips += 1;
            let cx = st.compute_c_x(&nc);
            bad.extend(check_c_x(g, &nc, &st, &cx).into_iter().map(|p| format!("sequence {seq}: {p}")));
            let fast: Vec<_> = decompose_active_complement(g, &st, &cx).into_iter().map(|c| (c.boundary, c.weight, c.size)).collect();
            if fast != complement_components_by_search(g, &nc, &st, &cx) {
                bad.push(format!("sequence {seq}: components differ after {flips} flips"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{clusters} clusters / {pairs} boundary pairs vs Floyd-Warshall, {spanners} spanners all-pairs, 100 flip sequences / {flips} flips vs search; {} mismatches{}",
            bad.len(),
            first(&bad)
        ),
    }
}

fn main() {
    let start = Instant::now();
    let mut tally = Tally::default();
    let mut violations = Vec::new();
    let mut checks = 0;

    let (shallow, minorfree, trade) = grid_scaling(&mut tally);
    let corpus = corpus();
    for inst in &corpus {
        run_all(inst, &mut tally, &mut violations, &mut checks);
    }
    let corpus_time = start.elapsed();
    let instances = corpus.len() + 4;

    let c1 = Outcome {
        pass: tally.failures.is_empty() && instances >= CORPUS_MIN && corpus_time <= CORPUS_BUDGET,
        detail: format!(
            "{instances} instances, {} certificates, {} failures, {:.0} s{}",
            tally.certificates,
            tally.failures.len(),
            corpus_time.as_secs_f64(),
            first(&tally.failures)
        ),
    };
    line(1, "certificate soundness", &c1);

    let (c2, c3) = criterion_2_3(&corpus, &tally);
    line(2, "oracle agreement (separators)", &c2);
    line(3, "oracle agreement (minors)", &c3);

    let ln = |p: &ScalePoint| (p.n as f64).ln();
    let c4 = drift(&shallow, |p| 5.0 * (p.n as f64 * ln(p)).sqrt());
    line(4, "separator size scaling, h * sqrt(n ln n)", &c4);
    let c5 = drift(&minorfree, |p| p.ell as f64 * 25.0 * ln(p));
    line(5, "separator size scaling, ell * h^2 * ln n", &c5);
    let mut c6 = drift(&trade, |p| (p.n as f64).powf(0.8) * ln(p).powf(TRADEOFF_Q));
    c6.detail = format!("q={TRADEOFF_Q}; {}", c6.detail);
    line(6, "trade-off bound, n^(4/5) (ln n)^q", &c6);

    let c7 = Outcome {
        pass: violations.is_empty() && checks > 0,
        detail: format!("{checks} invariant checks over the corpus, {} violations{}{}", violations.len(), kinds(&violations), first(&violations)),
    };
    line(7, "structural invariants", &c7);

    let c8 = criterion_8();
    line(8, "exact sub-algorithm correctness", &c8);

    let s_shallow = loglog_slope(&shallow.iter().map(|p| (p.n as f64, p.secs)).collect::<Vec<_>>());
    let s_balanced = loglog_slope(&minorfree.iter().map(|p| (p.n as f64, p.secs)).collect::<Vec<_>>());
    let c9 = Outcome {
        pass: s_balanced < s_shallow - SLOPE_GAP,
        detail: format!(
            "time slope balanced {s_balanced:.3} vs shallow-balanced {s_shallow:.3} (need a gap of {SLOPE_GAP}); informational, see README; times {}",
            shallow.iter().zip(&minorfree).map(|(a, b)| format!("k={}: {:.4}s/{:.4}s", a.k, a.secs, b.secs)).collect::<Vec<_>>().join(", ")
        ),
    };
    line(9, "empirical time exponent", &c9);

    println!("total {:.0} s", start.elapsed().as_secs_f64());
    let gated = [&c1, &c2, &c3, &c4, &c5, &c6, &c7, &c8];
    if gated.iter().any(|o| !o.pass) {
        std::process::exit(1);
    }
}
