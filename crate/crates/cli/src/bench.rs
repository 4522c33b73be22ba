//! Suite runner: a TOML matrix of generators × algorithms × h × seeds, every
//! certificate verified, log-log time slopes fitted per algorithm.
//!
//! ```toml
//! [[matrix]]
//! generators = ["grid:32", "grid:64", "grid:128"]
//! algorithms = ["shallow-balanced", "balanced"]
//! h = [5]
//! seeds = [0]
//! repeats = 3
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use sepkit::approx::approx_largest_clique_minor;
use sepkit::certificates::verify;
use sepkit::generators::{generate, GenSpec};
use sepkit::io::{write_graph, Format};
use sepkit::minorfree::{balanced_minor_free_ell, balanced_separator};
use sepkit::shallow::{balanced_ell, shallow_separator_balanced};
use sepkit::tradeoff::{tradeoff_separator, TradeoffParams};
use sepkit::{Graph, SepError, SepOrMinor};

use crate::EXIT_VERIFY;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub matrix: Vec<Matrix>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    pub generators: Vec<GenSpecText>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_h")]
    pub h: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

fn default_h() -> Vec<usize> {
    vec![5]
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_eps() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.8
}
fn default_repeats() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "String")]
pub struct GenSpecText(pub GenSpec);

impl TryFrom<String> for GenSpecText {
    type Error = SepError;
    fn try_from(s: String) -> Result<Self, SepError> {
        s.parse().map(GenSpecText)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    ShallowBalanced,
    Balanced,
    Tradeoff,
    ApproxMinor,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::ShallowBalanced => "shallow-balanced",
            Algorithm::Balanced => "balanced",
            Algorithm::Tradeoff => "tradeoff",
            Algorithm::ApproxMinor => "approx-minor",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub ell: Option<usize>,
    pub algorithm: Algorithm,
    pub kind: &'static str,
    pub separator_size: Option<usize>,
    pub minor_order: Option<usize>,
    pub wall_ms: f64,
    pub iterations: usize,
    /// Trees grown and cuts taken over the whole run.
    pub trees: usize,
    pub cuts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Slope {
    pub algorithm: Algorithm,
    pub family: String,
    pub h: usize,
    pub points: usize,
    pub slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`; `None` below two distinct x.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx < 1e-12 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

struct Run {
    result: SepOrMinor,
    h: usize,
    ell: Option<usize>,
    iterations: usize,
    trees: usize,
    cuts: usize,
}

fn run_one(g: &Graph, alg: Algorithm, h: usize, eps: f64, delta: f64, seed: u64) -> anyhow::Result<Run> {
    let n = g.n();
    Ok(match alg {
        Algorithm::ShallowBalanced => {
            let o = shallow_separator_balanced(g, h, eps, seed)?;
            Run { result: o.result, h, ell: Some(balanced_ell(n, h)), iterations: o.stats.iterations, trees: o.stats.trees, cuts: o.stats.cuts }
        }
        Algorithm::Balanced => {
            let o = balanced_separator(g, h, eps.min(0.5), seed)?;
            Run { result: o.result, h, ell: Some(balanced_minor_free_ell(n, h)), iterations: o.stats.iterations, trees: o.stats.trees, cuts: o.stats.cuts }
        }
        Algorithm::Tradeoff => {
            let mut p = TradeoffParams::new(h, delta);
            p.seed = seed;
            let o = tradeoff_separator(g, &p)?;
            let inner = o.stats.inner.unwrap_or_default();
            Run { result: o.result, h, ell: None, iterations: inner.iterations, trees: inner.trees, cuts: inner.cuts }
        }
        Algorithm::ApproxMinor => {
            let o = approx_largest_clique_minor(g, eps, seed)?;
            Run { result: SepOrMinor::MinorWitness(o.witness), h: o.h_found, ell: None, iterations: o.separator_calls, trees: 0, cuts: 0 }
        }
    })
}

fn repro(dir: &Path, row: &Row, g: &Graph, result: &SepOrMinor) -> anyhow::Result<PathBuf> {
    let stem = format!("repro-{}-{}-{}", row.algorithm.name(), row.generator.replace(':', "_"), row.seed);
    let gp = dir.join(format!("{stem}.txt"));
    let mut f = std::fs::File::create(&gp)?;
    write_graph(g, Format::EdgeList, &mut f)?;
    std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(result)?)?;
    Ok(gp)
}

/// Runs every cell of the suite. A certificate that fails verification
/// stops the run after writing the instance next to the report.
pub fn execute(suite: &Suite, repro_dir: &Path, verbose: u8) -> anyhow::Result<(Vec<Row>, Vec<Slope>)> {
    let mut rows = Vec::new();
    for mx in &suite.matrix {
        for gen in &mx.generators {
            for &seed in &mx.seeds {
                let g = generate(&gen.0, seed)?.graph;
                for &h in &mx.h {
                    for &alg in &mx.algorithms {
                        let mut best = f64::INFINITY;
                        let mut run = None;
                        for _ in 0..mx.repeats.max(1) {
                            let t = Instant::now();
                            let r = run_one(&g, alg, h, mx.eps, mx.delta, seed)?;
                            best = best.min(t.elapsed().as_secs_f64() * 1e3);
                            run = Some(r);
                        }
                        let r = run.expect("at least one repeat");
                        let row = Row {
                            generator: gen.0.to_string(),
                            seed,
                            n: g.n(),
                            m: g.m(),
                            h: r.h,
                            ell: r.ell,
                            algorithm: alg,
                            kind: r.result.kind(),
                            separator_size: r.result.separator().map(|s| s.size()),
                            minor_order: r.result.witness().map(|w| w.h()),
                            wall_ms: best,
                            iterations: r.iterations,
                            trees: r.trees,
                            cuts: r.cuts,
                        };
                        let report = verify(&g, &r.result, r.h);
                        if !report.ok {
                            let p = repro(repro_dir, &row, &g, &r.result)?;
                            bail!(VerifyFailed(format!("{} on {} (seed {}): {report}; instance written to {}", alg.name(), row.generator, seed, p.display())));
                        }
                        if verbose > 0 {
                            eprintln!("{:>16} {:>20} {:>10.1} ms {}", alg.name(), row.generator, best, row.kind);
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }
    Ok((rows.clone(), slopes(&rows)))
}

pub fn slopes(rows: &[Row]) -> Vec<Slope> {
    let mut groups: BTreeMap<(Algorithm, String, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let family = r.generator.split(':').next().unwrap_or_default().to_string();
        groups.entry((r.algorithm, family, r.h)).or_default().push((r.n as f64, r.wall_ms));
    }
    groups
        .into_iter()
        .filter_map(|((algorithm, family, h), pts)| {
            loglog_slope(&pts).map(|slope| Slope { algorithm, family, h, points: pts.len(), slope })
        })
        .collect()
}

pub fn summary_table(rows: &[Row], slopes: &[Slope]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:<22} {:>8} {:>9} {:>3} {:>5} {:<20} {:>8} {:>11}", "algorithm", "generator", "n", "m", "h", "ell", "kind", "|C|", "ms");
    for r in rows {
        let ell = r.ell.map_or("-".into(), |e| e.to_string());
        let size = r.separator_size.or(r.minor_order).map_or("-".into(), |e| e.to_string());
        let _ = writeln!(s, "{:<18} {:<22} {:>8} {:>9} {:>3} {:>5} {:<20} {:>8} {:>11.2}", r.algorithm.name(), r.generator, r.n, r.m, r.h, ell, r.kind, size, r.wall_ms);
    }
    if !slopes.is_empty() {
        let _ = writeln!(s, "\nlog-log slope of time vs n");
        for sl in slopes {
            let _ = writeln!(s, "  {:<18} {:<16} h={:<3} points={:<3} slope={:.3}", sl.algorithm.name(), sl.family, sl.h, sl.points, sl.slope);
        }
    }
    s
}

#[derive(Debug)]
pub struct VerifyFailed(pub String);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "certificate verification failed: {}", self.0)
    }
}

impl std::error::Error for VerifyFailed {}

pub fn run(suite_path: &Path, out: Option<&Path>, verbose: u8) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(suite_path).with_context(|| format!("reading {}", suite_path.display()))?;
    let suite: Suite = toml::from_str(&text).map_err(|e| SepError::InvalidParameter(format!("suite: {e}")))?;
    let dir = out.and_then(Path::parent).filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let (rows, slopes) = match execute(&suite, dir, verbose) {
        Ok(x) => x,
        Err(e) if e.is::<VerifyFailed>() => {
            eprintln!("error: {e}");
            return Ok(EXIT_VERIFY);
        }
        Err(e) => return Err(e),
    };
    let mut jsonl = String::new();
    for r in &rows {
        let mut v = serde_json::to_value(r)?;
        v["record"] = "run".into();
        jsonl += &(serde_json::to_string(&v)? + "\n");
    }
    for s in &slopes {
        let mut v = serde_json::to_value(s)?;
        v["record"] = "slope".into();
        jsonl += &(serde_json::to_string(&v)? + "\n");
    }
    let table = summary_table(&rows, &slopes);
    match out {
        Some(p) => {
            std::fs::write(p, &jsonl).with_context(|| format!("writing {}", p.display()))?;
            std::fs::write(p.with_extension("txt"), &table)?;
            print!("{table}");
        }
        None => {
            print!("{jsonl}");
            eprint!("{table}");
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        assert!((loglog_slope(&pts).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(loglog_slope(&[(5.0, 1.0)]), None);
        assert_eq!(loglog_slope(&[(5.0, 1.0), (5.0, 2.0)]), None);
    }

    #[test]
    fn empty_suite_gives_empty_report() {
        let suite: Suite = toml::from_str("").unwrap();
        let (rows, slopes) = execute(&suite, Path::new("."), 0).unwrap();
        assert!(rows.is_empty() && slopes.is_empty());
    }

    #[test]
    fn rows_are_deterministic_apart_from_time() {
        let suite: Suite = toml::from_str(
            r#"
            [[matrix]]
            generators = ["grid:12", "path:40", "planted-minor:60:5"]
            algorithms = ["shallow-balanced", "balanced", "tradeoff", "approx-minor"]
            seeds = [3]
            "#,
        )
        .unwrap();
        let strip = |rows: Vec<Row>| -> Vec<String> {
            rows.into_iter()
                .map(|mut r| {
                    r.wall_ms = 0.0;
                    serde_json::to_string(&r).unwrap()
                })
                .collect()
        };
        let a = strip(execute(&suite, Path::new("."), 0).unwrap().0);
        let b = strip(execute(&suite, Path::new("."), 0).unwrap().0);
        assert_eq!(a.len(), 12);
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Suite>("[[matrix]]\ngenerators=[]\nalgorithms=[]\nbogus=1").is_err());
        assert!(toml::from_str::<Suite>("[[matrix]]\ngenerators=[\"blob:3\"]\nalgorithms=[]").is_err());
    }
}
