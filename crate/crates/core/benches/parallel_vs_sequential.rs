//! Rayon against the sequential fallback on the parallel stages: cluster
//! indexing and the whole clustering-based separator, plus the approximate
//! clique-minor search whose recursion fans out over components.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sepkit::active::ClusterIndex;
use sepkit::approx::approx_largest_clique_minor_with;
use sepkit::clustering::{nested_r_clustering, ClusterParams};
use sepkit::generators;
use sepkit::minorfree::{balanced_minor_free_ell, minor_free_separator, MinorFreeParams};
use sepkit::Parallelism;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)];

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("nested_clustering");
    group.sample_size(10);
    for k in [48, 96] {
        let g = generators::grid(k, k);
        for (name, mode) in MODES {
            let mut p = ClusterParams::new(64, 5);
            p.parallelism = mode;
            group.bench_with_input(BenchmarkId::new(name, k), &g, |b, g| {
                b.iter(|| {
                    let nc = nested_r_clustering(g, &p).unwrap().done().unwrap();
                    ClusterIndex::new(g, &nc, mode)
                })
            });
        }
    }
    group.finish();
}

fn separator(c: &mut Criterion) {
    let mut group = c.benchmark_group("minor_free_separator");
    group.sample_size(10);
    for k in [48, 96] {
        let g = generators::grid(k, k);
        for (name, mode) in MODES {
            let mut p = MinorFreeParams::new(5, balanced_minor_free_ell(g.n(), 5));
            p.parallelism = mode;
            group.bench_with_input(BenchmarkId::new(name, k), &g, |b, g| b.iter(|| minor_free_separator(g, &p).unwrap()));
        }
    }
    group.finish();
}

fn approx(c: &mut Criterion) {
    let mut group = c.benchmark_group("approx_clique_minor");
    group.sample_size(10);
    let (g, _) = generators::planted_minor(600, 6, 1).unwrap();
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| approx_largest_clique_minor_with(&g, 1.0, 0, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, clustering, separator, approx);
criterion_main!(benches);
