use proptest::prelude::*;

use sepkit::approx::approx_largest_clique_minor;
use sepkit::certificates::{verify, Ratio};
use sepkit::generators::{self, generate, GenSpec};
use sepkit::io::{load_graph, write_graph, Format};
use sepkit::minorfree::balanced_separator;
use sepkit::oracle::{brute_force_min_separator, brute_force_minor_detect};
use sepkit::shallow::shallow_separator_balanced;
use sepkit::spanner::{build_spanner, stretch_check, PairSample};
use sepkit::tradeoff::linear_time_separator;
use sepkit::{Graph, SepOrMinor};

/// Simple graph on `n` vertices from an edge mask over all pairs.
fn from_mask(n: usize, mask: &[bool]) -> Graph {
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    let edges: Vec<_> = pairs.zip(mask).filter(|(_, &keep)| keep).map(|(e, _)| e).collect();
    Graph::from_edges(n, &edges).unwrap()
}

fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2).prop_map(move |m| from_mask(n, &m)))
}

fn connected(g: &Graph) -> bool {
    g.components_where(|_| true).len() == 1
}

fn corpus_spec() -> impl Strategy<Value = GenSpec> {
    prop_oneof![
        (2usize..14).prop_map(|k| GenSpec::Grid { k }),
        (3usize..10).prop_map(|k| GenSpec::Torus { k }),
        (1usize..120).prop_map(|n| GenSpec::Path { n }),
        (1usize..6).prop_map(|depth| GenSpec::BinaryTree { depth }),
        (1usize..150).prop_map(|n| GenSpec::RandomTree { n }),
        (3usize..6, 20usize..40).prop_map(|(d, half)| GenSpec::RandomRegular { n: 2 * half, d }),
        (3usize..6, 40usize..120).prop_map(|(h, n)| GenSpec::PlantedMinor { n, h }),
        (3usize..6, 2usize..5).prop_map(|(h, t)| GenSpec::CliqueBlowup { h, t }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trips(g in small_graph(12)) {
        for fmt in [Format::EdgeList, Format::Dimacs] {
            let mut buf = Vec::new();
            write_graph(&g, fmt, &mut buf).unwrap();
            let back = load_graph(buf.as_slice(), fmt).unwrap();
            prop_assert_eq!(back.n(), g.n());
            prop_assert_eq!(back.edges(), g.edges());
        }
    }

    #[test]
    fn generators_are_deterministic(spec in corpus_spec(), seed in 0u64..1000) {
        let a = generate(&spec, seed).unwrap();
        let b = generate(&spec, seed).unwrap();
        prop_assert_eq!(a.graph.edges(), b.graph.edges());
        prop_assert_eq!(a.planted, b.planted);
    }

    #[test]
    fn grid_counts(k in 1usize..40) {
        let g = generators::grid(k, k);
        prop_assert_eq!(g.n(), k * k);
        prop_assert_eq!(g.m(), 2 * k * (k - 1));
    }

    #[test]
    fn planted_sets_verify(spec in corpus_spec(), seed in 0u64..100) {
        let gen = generate(&spec, seed).unwrap();
        if let Some(sets) = gen.planted {
            let h = sets.len();
            let w = sepkit::MinorWitness::from_branch_sets(&gen.graph, sets, None).expect("planted sets form a clique minor");
            prop_assert!(verify(&gen.graph, &SepOrMinor::MinorWitness(w), h).ok);
        }
    }

    #[test]
    fn every_output_verifies(spec in corpus_spec(), seed in 0u64..100, h in 3usize..7) {
        let g = generate(&spec, seed).unwrap().graph;
        let outs = [
            shallow_separator_balanced(&g, h, 1.0, seed).unwrap().result,
            balanced_separator(&g, h, 0.5, seed).unwrap().result,
            linear_time_separator(&g, h, 0.1, seed).unwrap().result,
        ];
        for out in &outs {
            let rep = verify(&g, out, h);
            prop_assert!(rep.ok, "{} on {}: {}", out.kind(), spec, rep);
            let text = serde_json::to_string(out).unwrap();
            let back: SepOrMinor = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, out);
        }
    }

    #[test]
    fn separators_not_below_optimum(g in small_graph(10), seed in 0u64..50, h in 3usize..5) {
        prop_assume!(connected(&g));
        let opt = brute_force_min_separator(&g, Ratio::TWO_THIRDS).unwrap().expect("a separator always exists");
        let free = brute_force_minor_detect(&g, h).unwrap().is_none();
        for out in [shallow_separator_balanced(&g, h, 1.0, seed).unwrap().result, balanced_separator(&g, h, 0.5, seed).unwrap().result] {
            prop_assert!(verify(&g, &out, h).ok);
            match &out {
                SepOrMinor::Separator(s) => prop_assert!(s.size() >= opt.size()),
                other => {
                    prop_assert!(!free, "{} returned on a K{}-free graph", other.kind(), h);
                }
            }
        }
    }

    #[test]
    fn witnesses_agree_with_oracle(g in small_graph(10), seed in 0u64..50, h in 3usize..5) {
        for out in [shallow_separator_balanced(&g, h, 1.0, seed).unwrap().result, balanced_separator(&g, h, 0.5, seed).unwrap().result] {
            if let SepOrMinor::MinorWitness(w) = &out {
                prop_assert!(brute_force_minor_detect(&g, w.h()).unwrap().is_some());
            }
        }
    }

    #[test]
    fn spanner_stretch(n in 2usize..60, p in 0.05f64..0.5, k in 1usize..4, seed in 0u64..1000) {
        let g = gnp(n, p, seed);
        let s = build_spanner(&g, k, seed);
        let rep = stretch_check(&g, &s, &PairSample::All);
        prop_assert_eq!(rep.disconnected, 0);
        prop_assert!(rep.max_ratio <= (2 * k - 1) as f64 + 1e-9);
    }

    #[test]
    fn approx_witness_is_clean(spec in corpus_spec(), seed in 0u64..20) {
        let g = generate(&spec, seed).unwrap().graph;
        prop_assume!(g.n() > 0);
        let r = approx_largest_clique_minor(&g, 1.0, seed).unwrap();
        prop_assert!(r.h_found >= 1);
        if g.m() > 0 {
            prop_assert!(r.h_found >= 2);
        }
        prop_assert!(verify(&g, &SepOrMinor::MinorWitness(r.witness), r.h_found).ok);
    }
}

fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
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

/// Adding edges never lowers the order found, along nested prefixes of an
/// edge order.
#[test]
fn approx_monotone_on_nested_corpora() {
    let mut regressions = Vec::new();
    for seed in 0..6u64 {
        let full = gnp(24, 0.3, seed);
        let edges = full.edges().to_vec();
        let mut last = 0;
        for cut in (0..=edges.len()).step_by(8) {
            let g = Graph::from_edges(24, &edges[..cut]).unwrap();
            let found = approx_largest_clique_minor(&g, 1.0, seed).unwrap().h_found;
            if found < last {
                regressions.push((seed, cut, last, found));
            }
            last = last.max(found);
        }
    }
    assert!(regressions.is_empty(), "{regressions:?}");
}
