//! `sep`: separators, clique minors, clusterings and benchmarks from the
//! command line.

mod bench;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sepkit::approx::approx_largest_clique_minor;
use sepkit::certificates::verify;
use sepkit::clustering::{check_nested, cluster_json, nested_r_clustering, ClusterParams, Clustered};
use sepkit::generators::{generate, GenSpec};
use sepkit::io::{load_graph, write_graph, Format};
use sepkit::minorfree::{balanced_minor_free_ell, minor_free_separator, MinorFreeParams};
use sepkit::shallow::{balanced_ell, shallow_separator, ShallowParams};
use sepkit::tradeoff::{tradeoff_separator, TradeoffParams};
use sepkit::{Graph, SepError, SepOrMinor};

pub const EXIT_SEPARATOR: u8 = 0;
pub const EXIT_WITNESS: u8 = 10;
pub const EXIT_REPORT: u8 = 11;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;
const EXIT_INTERNAL: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "sep", version, about = "Balanced separators or clique-minor certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Repeat for more detail on stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a generated graph, e.g. `grid:32` or `planted-minor:200:6`.
    Gen {
        spec: GenSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "edge-list")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the planted branch sets (JSON) here.
        #[arg(long)]
        planted: Option<PathBuf>,
    },
    /// Separator or depth-bounded clique minor for a given ℓ.
    Shallow(AlgoArgs),
    /// Separator or clique minor through the clustering.
    Minorfree(AlgoArgs),
    /// Separator of size about n^δ, or a clique minor.
    Tradeoff(AlgoArgs),
    /// Nested r-clustering, or a minor met while building it.
    Cluster(AlgoArgs),
    /// Large clique minor by recursive separation.
    ApproxMinor(AlgoArgs),
    /// Check a certificate against a graph.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Certificate JSON, as written by the other subcommands.
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        h: Option<usize>,
    },
    /// Run a TOML suite and write a JSON-lines report plus a summary table.
    Bench {
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Graph file; `-` reads stdin.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generate the input instead of reading it.
    #[arg(long)]
    gen: Option<GenSpec>,
    #[arg(long, default_value = "edge-list")]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct AlgoArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 5)]
    h: usize,
    /// Minor depth; defaults to the balanced choice for the algorithm.
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.8)]
    delta: f64,
    /// Cluster size for `cluster`.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check the algorithm's internal invariants while it runs.
    #[arg(long)]
    debug_assert: bool,
}

impl AlgoArgs {
    fn validate(&self) -> anyhow::Result<()> {
        if self.h < 2 {
            bail!(SepError::InvalidParameter(format!("--h must be at least 2, got {}", self.h)));
        }
        if self.ell == Some(0) {
            bail!(SepError::InvalidParameter("--ell must be at least 1".into()));
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e <= 1.0) {
                bail!(SepError::InvalidParameter(format!("--eps must lie in (0, 1], got {e}")));
            }
        }
        if !(0.75..1.0).contains(&self.delta) {
            bail!(SepError::InvalidParameter(format!("--delta must lie in [0.75, 1), got {}", self.delta)));
        }
        if self.r == Some(0) {
            bail!(SepError::InvalidParameter("--r must be positive".into()));
        }
        Ok(())
    }
}

fn read_graph(input: &Input, seed: u64) -> anyhow::Result<Graph> {
    match (&input.graph, &input.gen) {
        (_, Some(spec)) => Ok(generate(spec, seed)?.graph),
        (Some(p), None) if p == Path::new("-") => Ok(load_graph(std::io::stdin().lock(), input.format)?),
        (Some(p), None) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Ok(load_graph(BufReader::new(f), input.format)?)
        }
        (None, None) => bail!(SepError::InvalidParameter("one of --graph or --gen is required".into())),
    }
}

fn emit(out: Option<&Path>, value: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn exit_for(r: &SepOrMinor) -> u8 {
    match r {
        SepOrMinor::Separator(_) => EXIT_SEPARATOR,
        SepOrMinor::MinorWitness(_) => EXIT_WITNESS,
        SepOrMinor::DensityCertificate(_) | SepOrMinor::MinorReport(_) => EXIT_REPORT,
    }
}

/// Verifies `result`, writes the certificate document and picks the exit code.
#[allow(clippy::too_many_arguments)]
fn finish(g: &Graph, h: usize, algorithm: &str, result: SepOrMinor, stats: Value, violations: &[String], a: &AlgoArgs, verbose: u8) -> anyhow::Result<u8> {
    let report = verify(g, &result, h);
    let doc = json!({
        "algorithm": algorithm,
        "n": g.n(),
        "m": g.m(),
        "h": h,
        "seed": a.seed,
        "result": result,
        "stats": stats,
        "verified": report.ok,
    });
    emit(a.out.as_deref(), &doc)?;
    if verbose > 0 {
        eprintln!("{algorithm}: {} on n={} m={}", result.kind(), g.n(), g.m());
    }
    if !report.ok {
        eprintln!("verification failed: {report}");
        return Ok(EXIT_VERIFY);
    }
    if !violations.is_empty() {
        for v in violations {
            eprintln!("invariant violated: {v}");
        }
        return Ok(EXIT_VERIFY);
    }
    Ok(exit_for(&result))
}

fn run_algo(which: &str, a: &AlgoArgs, verbose: u8) -> anyhow::Result<u8> {
    a.validate()?;
    let g = read_graph(&a.input, a.seed)?;
    let n = g.n();
    match which {
        "shallow" => {
            let mut p = ShallowParams::new(a.h, a.ell.unwrap_or_else(|| balanced_ell(n, a.h)));
            p.eps = a.eps.unwrap_or(p.eps);
            p.seed = a.seed;
            p.check_invariants = a.debug_assert;
            let out = shallow_separator(&g, &p)?;
            let stats = json!({ "ell": p.ell, "loop": out.stats });
            finish(&g, a.h, which, out.result, stats, &out.stats.violations, a, verbose)
        }
        "minorfree" => {
            let mut p = MinorFreeParams::new(a.h, a.ell.unwrap_or_else(|| balanced_minor_free_ell(n, a.h)));
            p.eps = a.eps.unwrap_or(p.eps);
            p.seed = a.seed;
            p.check_invariants = a.debug_assert;
            let out = minor_free_separator(&g, &p)?;
            let stats = json!({ "ell": p.ell, "loop": out.stats });
            finish(&g, a.h, which, out.result, stats, &out.stats.violations, a, verbose)
        }
        "tradeoff" => {
            let mut p = TradeoffParams::new(a.h, a.delta);
            p.eps = a.eps.unwrap_or(p.eps);
            p.seed = a.seed;
            let out = tradeoff_separator(&g, &p)?;
            let stats = json!({ "delta": a.delta, "contraction": out.stats });
            finish(&g, a.h, which, out.result, stats, &[], a, verbose)
        }
        "approx-minor" => {
            let out = approx_largest_clique_minor(&g, a.eps.unwrap_or(1.0), a.seed)?;
            let h = out.h_found;
            let report = verify(&g, &SepOrMinor::MinorWitness(out.witness.clone()), h);
            let doc = json!({
                "algorithm": which,
                "n": g.n(),
                "m": g.m(),
                "h": h,
                "seed": a.seed,
                "result": SepOrMinor::MinorWitness(out.witness),
                "stats": { "ratio_claim": out.ratio_claim, "separator_calls": out.separator_calls },
                "verified": report.ok,
            });
            emit(a.out.as_deref(), &doc)?;
            if !report.ok {
                eprintln!("verification failed: {report}");
                return Ok(EXIT_VERIFY);
            }
            Ok(EXIT_SEPARATOR)
        }
        "cluster" => {
            let mut p = ClusterParams::new(a.r.unwrap_or_else(|| default_r(n, a.h)), a.h);
            p.eps = a.eps.unwrap_or(p.eps);
            p.seed = a.seed;
            match nested_r_clustering(&g, &p)? {
                Clustered::Done(nc) => {
                    let problems = if a.debug_assert { check_nested(&g, &nc) } else { Vec::new() };
                    let doc = json!({ "algorithm": which, "n": g.n(), "m": g.m(), "h": a.h, "r": p.r, "seed": a.seed, "clustering": cluster_json(&nc) });
                    emit(a.out.as_deref(), &doc)?;
                    for v in &problems {
                        eprintln!("invariant violated: {v}");
                    }
                    Ok(if problems.is_empty() { EXIT_SEPARATOR } else { EXIT_VERIFY })
                }
                Clustered::Minor(m) => finish(&g, a.h, which, m, json!({ "r": p.r }), &[], a, verbose),
            }
        }
        _ => unreachable!("unknown algorithm {which}"),
    }
}

/// `r` at four times the admissible floor, so a default run clusters.
fn default_r(n: usize, h: usize) -> usize {
    let floor = ClusterParams::new(1, h).r_floor(n);
    ((4.0 * floor).ceil() as usize).max(2)
}

fn run_verify(input: &Input, cert: &Path, h: Option<usize>) -> anyhow::Result<u8> {
    let g = read_graph(input, 0)?;
    let text = std::fs::read_to_string(cert).with_context(|| format!("reading {}", cert.display()))?;
    let doc: Value = serde_json::from_str(&text).context("certificate is not JSON")?;
    let h = h.or_else(|| doc.get("h").and_then(Value::as_u64).map(|v| v as usize));
    let body = doc.get("result").cloned().unwrap_or(doc);
    let result: SepOrMinor = serde_json::from_value(body).context("certificate has an unknown shape")?;
    let Some(h) = h else {
        bail!(SepError::InvalidParameter("--h is required when the certificate does not record it".into()));
    };
    let report = verify(&g, &result, h);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.ok { exit_for(&result) } else { EXIT_VERIFY })
}

fn run_gen(spec: &GenSpec, seed: u64, format: Format, out: Option<&Path>, planted: Option<&Path>) -> anyhow::Result<u8> {
    let gen = generate(spec, seed)?;
    match out {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(f);
            write_graph(&gen.graph, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_graph(&gen.graph, format, &mut w)?;
            w.flush()?;
        }
    }
    if let Some(p) = planted {
        let sets = gen.planted.unwrap_or_default();
        std::fs::write(p, serde_json::to_string(&sets)? + "\n")?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let v = cli.verbose;
    let res = match &cli.cmd {
        Cmd::Gen { spec, seed, format, out, planted } => run_gen(spec, *seed, *format, out.as_deref(), planted.as_deref()),
        Cmd::Shallow(a) => run_algo("shallow", a, v),
        Cmd::Minorfree(a) => run_algo("minorfree", a, v),
        Cmd::Tradeoff(a) => run_algo("tradeoff", a, v),
        Cmd::Cluster(a) => run_algo("cluster", a, v),
        Cmd::ApproxMinor(a) => run_algo("approx-minor", a, v),
        Cmd::Verify { input, cert, h } => run_verify(input, cert, *h),
        Cmd::Bench { suite, out } => bench::run(suite, out.as_deref(), v),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<SepError>()
                .is_some_and(|s| matches!(s, SepError::InvalidParameter(_) | SepError::Graph(_)))
                || e.downcast_ref::<sepkit::GraphError>().is_some()
                || e.root_cause().downcast_ref::<std::io::Error>().is_some();
            ExitCode::from(if usage { EXIT_USAGE } else { EXIT_INTERNAL })
        }
    }
}
