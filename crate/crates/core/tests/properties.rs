//! Property tests over random graphs, incidences and subsets.

use proptest::prelude::*;

use rigmod::graph::{project, sample_er, sample_incidence, Graph, Incidence};
use rigmod::harness::{run_sweep, GridPoint, Regime, SweepConfig};
use rigmod::modularity::{
    best_large_subset_deviation, best_restricted, complement_check, exact_modularity, louvain, score,
    DEFAULT_EXACT_LIMIT, DEFAULT_LEVELS, TOLERANCE,
};
use rigmod::{Partition, RigParams};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n), 1..3 * n)))
        .prop_filter_map("needs an edge", |(n, pairs)| {
            let g = Graph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).ok()?;
            (g.edge_count() > 0).then_some(g)
        })
}

fn incidence_strategy() -> impl Strategy<Value = Incidence> {
    (1usize..25, 1usize..15, 0.0..0.5f64, any::<u64>())
        .prop_map(|(n, m, p, seed)| sample_incidence(&RigParams::new(n, m, p, seed).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_optimum_is_in_unit_interval(g in graph_strategy(9)) {
        let s = exact_modularity(&g, DEFAULT_EXACT_LIMIT).unwrap().score;
        prop_assert!((0.0..1.0).contains(&s));
    }

    #[test]
    fn restricted_sandwich(g in graph_strategy(9)) {
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).unwrap().score;
        for k in [2usize, 3] {
            let r = best_restricted(&g, k).unwrap().score;
            prop_assert!(r <= exact + TOLERANCE);
            prop_assert!(exact <= k as f64 / (k as f64 - 1.0) * r + TOLERANCE);
        }
    }

    #[test]
    fn complement_symmetry(g in graph_strategy(16), mask in any::<u16>()) {
        let s: Vec<usize> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        let (a, b) = complement_check(&g, &s).unwrap();
        prop_assert!((a - b).abs() <= TOLERANCE);
    }

    #[test]
    fn large_side_bound(g in graph_strategy(10)) {
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).unwrap().score;
        let (best, subset) = best_large_subset_deviation(&g).unwrap();
        prop_assert!(2 * subset.len() >= g.n());
        prop_assert!(exact <= 4.0 * best + TOLERANCE);
    }

    #[test]
    fn louvain_never_beats_exact(g in graph_strategy(10)) {
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).unwrap().score;
        let l = louvain(&g, 0, DEFAULT_LEVELS).unwrap();
        prop_assert!(l.score >= 0.0 && l.score <= exact + TOLERANCE);
        prop_assert!((score(&g, &l.partition).unwrap().score - l.score).abs() <= TOLERANCE);
    }

    #[test]
    fn score_ignores_block_labels(
        g in graph_strategy(14),
        labels in proptest::collection::vec(0usize..5, 14),
        shift in 1usize..5,
    ) {
        let labels = &labels[..g.n()];
        let relabeled: Vec<usize> = labels.iter().map(|l| (l + shift) % 5 + 7).collect();
        let a = score(&g, &Partition::from_labels(labels)).unwrap().score;
        let b = score(&g, &Partition::from_labels(&relabeled)).unwrap().score;
        prop_assert!((a - b).abs() <= TOLERANCE);
    }

    #[test]
    fn degrees_sum_to_twice_edges(inc in incidence_strategy()) {
        let g = project(&inc);
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
        prop_assert_eq!(g.volume(), 2 * g.edge_count());
    }

    #[test]
    fn full_membership_projects_to_complete_graph(n in 2usize..30, m in 1usize..5, seed in any::<u64>()) {
        let g = project(&sample_incidence(&RigParams::new(n, m, 1.0, seed).unwrap()).unwrap());
        prop_assert_eq!(g, Graph::complete(n));
    }

    #[test]
    fn samplers_are_reproducible(n in 1usize..40, m in 1usize..20, p in 0.0..1.0f64, seed in any::<u64>()) {
        let params = RigParams::new(n, m, p, seed).unwrap();
        prop_assert_eq!(sample_incidence(&params).unwrap(), sample_incidence(&params).unwrap());
        prop_assert_eq!(sample_er(n, p, seed).unwrap(), sample_er(n, p, seed).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sweep_rows_are_consistent(n in 2usize..60, m in 1usize..40, p in 0.0..0.4f64, seed in any::<u64>()) {
        let cfg = SweepConfig::new(Regime::Custom, vec![GridPoint { n, m, p }], 2, seed);
        for row in run_sweep(&cfg).unwrap() {
            match row.louvain_mod {
                Some(l) => {
                    prop_assert!((0.0..1.0).contains(&l));
                    prop_assert!(row.edges > 0);
                    if let Some(a) = row.attr_partition_mod {
                        prop_assert!(a <= 1.0);
                    }
                }
                None => prop_assert_eq!(row.flag, "empty_graph"),
            }
            prop_assert!(row.hat_contained && row.hat_edges + row.delta == row.edges);
        }
    }
}
