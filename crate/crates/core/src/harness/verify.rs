//! Randomized self-check of the library's invariants.

use rand::Rng;

use crate::constructions::{couple_hat_with, matched_er_probability};
use crate::graph::{project, sample_er_with, sample_incidence, sample_incidence_with, Graph, Incidence, RigParams};
use crate::modularity::{
    best_large_subset_deviation, best_restricted, complement_check, exact_modularity, louvain, score, Partition,
    DEFAULT_EXACT_LIMIT, DEFAULT_LEVELS, TOLERANCE,
};
use crate::rng::{stream, RigRng};
use crate::stats::{clique_bounds, pair_cover, subset_counts};

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random instances per check.
    pub instances: usize,
    /// Swaps in a scorer that drops the square on the volume term; every
    /// check that relies on the scorer must then fail.
    pub mutate_scorer: bool,
}

impl VerifyOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            instances: 40,
            mutate_scorer: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Scorer = fn(&Graph, &Partition) -> f64;

fn true_scorer(g: &Graph, p: &Partition) -> f64 {
    score(g, p).expect("checked instance").score
}

fn mutated_scorer(g: &Graph, p: &Partition) -> f64 {
    score(g, p)
        .expect("checked instance")
        .per_block
        .iter()
        .map(|t| t.edge_fraction - t.volume_fraction)
        .sum()
}

fn random_small_graph(rng: &mut RigRng, max_n: usize) -> Graph {
    loop {
        let n = rng.random_range(4..=max_n);
        let g = if rng.random_bool(0.5) {
            {
                let q = rng.random_range(0.2..0.7);
                sample_er_with(rng, n, q)
            }
        } else {
            let m = rng.random_range(2..8);
            let p = rng.random_range(0.15..0.5);
            project(&sample_incidence_with(rng, n, m, p))
        };
        if g.edge_count() > 0 {
            return g;
        }
    }
}

fn random_subset(rng: &mut RigRng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

fn random_incidence(rng: &mut RigRng) -> Incidence {
    let n = rng.random_range(2..40);
    let m = rng.random_range(1..50);
    let p = rng.random_range(0.0..0.3);
    sample_incidence_with(rng, n, m, p)
}

struct Suite {
    seed: u64,
    instances: usize,
    scorer: Scorer,
    outcomes: Vec<CheckOutcome>,
}

impl Suite {
    /// Runs `check` on `instances` independent streams; the first failure
    /// message is kept.
    fn check(&mut self, id: u64, name: &'static str, mut check: impl FnMut(&mut RigRng, Scorer) -> Result<(), String>) {
        let mut failure = None;
        for i in 0..self.instances {
            let mut rng = stream(self.seed, &[id, i as u64]);
            if let Err(msg) = check(&mut rng, self.scorer) {
                failure = Some(format!("instance {i}: {msg}"));
                break;
            }
        }
        let passed = failure.is_none();
        let detail = failure.unwrap_or_else(|| format!("{} instances", self.instances));
        self.outcomes.push(CheckOutcome { name, passed, detail });
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// Negated comparisons are deliberate: a NaN must fail a check.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn verify(options: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut suite = Suite {
        seed: options.seed,
        instances: options.instances.max(1),
        scorer: if options.mutate_scorer {
            mutated_scorer
        } else {
            true_scorer
        },
        outcomes: Vec::new(),
    };

    suite.check(0, "known_scores", |_, scorer| {
        let tri = Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        let split = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        ensure!(
            close(scorer(&tri, &split), 0.5),
            "two triangles scored {}",
            scorer(&tri, &split)
        );
        let k2 = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = scorer(&k2, &Partition::new(vec![0, 1]).unwrap());
        ensure!(close(s, -0.5), "K2 singletons scored {s}");
        Ok(())
    });

    suite.check(1, "scorer_matches_enumerator", |rng, scorer| {
        let g = random_small_graph(rng, 8);
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let s = scorer(&g, &exact.partition);
        ensure!(close(s, exact.score), "scorer {s} vs enumerator {}", exact.score);
        Ok(())
    });

    suite.check(2, "block_sum_and_relabel", |rng, scorer| {
        let g = random_small_graph(rng, 12);
        let k = rng.random_range(1..=4);
        let labels: Vec<usize> = (0..g.n()).map(|_| rng.random_range(0..k)).collect();
        let p = Partition::from_labels(&labels);
        let report = score(&g, &p).map_err(|e| e.to_string())?;
        let sum: f64 = report.per_block.iter().map(|t| t.deviation).sum();
        ensure!(close(sum, report.score), "block sum {sum} vs score {}", report.score);
        let vol: f64 = report.per_block.iter().map(|t| t.volume_fraction).sum();
        ensure!(close(vol, 1.0), "volume fractions sum to {vol}");
        let shifted: Vec<usize> = labels.iter().map(|&l| (l + 1) % k + 10).collect();
        let q = Partition::from_labels(&shifted);
        ensure!(close(scorer(&g, &p), scorer(&g, &q)), "relabeling changed the score");
        Ok(())
    });

    suite.check(3, "complement_symmetry", |rng, _| {
        let g = random_small_graph(rng, 16);
        let s = random_subset(rng, g.n());
        let (a, b) = complement_check(&g, &s).map_err(|e| e.to_string())?;
        ensure!(close(a, b), "deviation {a} vs complement {b}");
        Ok(())
    });

    suite.check(4, "restricted_sandwich", |rng, scorer| {
        let g = random_small_graph(rng, 9);
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let exact_score = scorer(&g, &exact.partition);
        ensure!(
            (0.0..1.0).contains(&exact.score),
            "exact score {} outside [0, 1)",
            exact.score
        );
        for k in [2usize, 3] {
            let r = best_restricted(&g, k).map_err(|e| e.to_string())?;
            let restricted = scorer(&g, &r.partition);
            let ratio = k as f64 / (k as f64 - 1.0);
            ensure!(
                restricted <= exact_score + TOLERANCE,
                "k={k}: restricted {restricted} > exact {exact_score}"
            );
            ensure!(
                exact_score <= ratio * restricted + TOLERANCE,
                "k={k}: exact {exact_score} > {ratio} * {restricted}"
            );
        }
        Ok(())
    });

    suite.check(5, "large_side_bound", |rng, _| {
        let g = random_small_graph(rng, 10);
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let (best, _) = best_large_subset_deviation(&g).map_err(|e| e.to_string())?;
        ensure!(
            exact.score <= 4.0 * best + TOLERANCE,
            "mod {} > 4 * {best}",
            exact.score
        );
        Ok(())
    });

    suite.check(6, "louvain_soundness", |rng, scorer| {
        let g = random_small_graph(rng, 10);
        let exact = exact_modularity(&g, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let l = louvain(&g, rng.random(), DEFAULT_LEVELS).map_err(|e| e.to_string())?;
        let s = scorer(&g, &l.partition);
        ensure!(l.score >= 0.0, "negative louvain score {}", l.score);
        ensure!(
            close(s, l.score),
            "louvain reported {} but partition scores {s}",
            l.score
        );
        ensure!(
            l.score <= exact.score + TOLERANCE,
            "louvain {} beats exact {}",
            l.score,
            exact.score
        );
        Ok(())
    });

    suite.check(7, "degree_sum", |rng, _| {
        let g = project(&random_incidence(rng));
        let total: usize = g.degrees().iter().sum();
        ensure!(
            total == 2 * g.edge_count(),
            "degree sum {total} vs 2e = {}",
            2 * g.edge_count()
        );
        Ok(())
    });

    suite.check(8, "clique_cover_bounds", |rng, _| {
        let inc = random_incidence(rng);
        let g = project(&inc);
        let s = random_subset(rng, inc.n());
        let mut mask = vec![false; inc.n()];
        s.iter().for_each(|&v| mask[v] = true);
        let e_s = g.edges().filter(|&(u, v)| mask[u] && mask[v]).count() as i64;
        let cut = g.edges().filter(|&(u, v)| mask[u] != mask[v]).count() as i64;
        let b = clique_bounds(&inc, &s).map_err(|e| e.to_string())?;
        ensure!(e_s <= b.es_upper as i64, "e(S) {e_s} > {}", b.es_upper);
        ensure!(cut >= b.cross_lower, "e(S, S̄) {cut} < {}", b.cross_lower);
        ensure!(
            2 * e_s + cut >= b.vol_lower,
            "vol(S) {} < {}",
            2 * e_s + cut,
            b.vol_lower
        );
        if b.e1 == 0 {
            ensure!(
                e_s == b.es_upper as i64 && 2 * e_s + cut == b.vol_lower,
                "bounds not tight without overlaps"
            );
        }
        Ok(())
    });

    suite.check(9, "edge_count_from_cliques", |rng, _| {
        let inc = random_incidence(rng);
        let e = project(&inc).edge_count() as u64;
        let pairs: u64 = inc
            .iter()
            .map(|l| (l.len() * l.len().saturating_sub(1) / 2) as u64)
            .sum();
        let cover = pair_cover(&inc);
        ensure!(
            pairs - cover.excess == e,
            "sum C(V,2) - excess = {} vs e = {e}",
            pairs - cover.excess
        );
        ensure!(e <= pairs, "e {e} exceeds clique pairs {pairs}");
        let counts = subset_counts(&inc, &random_subset(rng, inc.n())).map_err(|e| e.to_string())?;
        let sizes = inc.sizes();
        ensure!(
            counts
                .x
                .iter()
                .zip(&counts.y)
                .zip(&sizes)
                .all(|((x, y), v)| x + y == *v),
            "X_S + X_S̄ != V"
        );
        Ok(())
    });

    suite.check(10, "coupling_containment", |rng, _| {
        let inc = random_incidence(rng);
        let c = couple_hat_with(rng, &inc);
        ensure!(c.g_hat.is_subgraph_of(&c.g), "Ĝ has an edge outside G");
        let big = inc.iter().filter(|l| l.len() >= 2).count();
        ensure!(
            c.g_hat.edge_count() <= big,
            "e(Ĝ) {} > #{{V_i >= 2}} {big}",
            c.g_hat.edge_count()
        );
        Ok(())
    });

    suite.check(11, "matched_er_monotone", |rng, _| {
        let n = rng.random_range(2..200);
        let m = rng.random_range(1..10_000);
        let p = rng.random_range(0.0..0.2);
        let base = matched_er_probability(n, m, p).map_err(|e| e.to_string())?.p_bar;
        let more_m = matched_er_probability(n, m + rng.random_range(1..100), p)
            .unwrap()
            .p_bar;
        let more_p = matched_er_probability(n, m, (p * 1.5).min(1.0)).unwrap().p_bar;
        ensure!(
            more_m >= base && more_p >= base,
            "p̄ decreased: {base} -> {more_m}, {more_p}"
        );
        Ok(())
    });

    suite.check(12, "seeded_reproducibility", |rng, _| {
        let seed = rng.random();
        let params = RigParams::new(rng.random_range(1..50), rng.random_range(1..50), 0.1, seed).unwrap();
        let a = sample_incidence(&params).map_err(|e| e.to_string())?;
        let b = sample_incidence(&params).map_err(|e| e.to_string())?;
        ensure!(a == b, "same seed gave different incidences");
        Ok(())
    });

    suite.outcomes
}
