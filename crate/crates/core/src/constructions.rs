//! Partitions and couplings built from the attribute structure.
//!
//! * The exclusive-attribute partition groups the vertices that hold exactly
//!   one attribute by that attribute; everything else goes to one remainder
//!   block.
//! * The thinned graph `Ĝ` keeps one uniformly chosen pair from each clique
//!   with at least two members, so `Ĝ ⊆ G` always holds; `Ĝ` is close in law
//!   to the Erdős–Rényi graph with the matched probability `p̄`.

use std::str::FromStr;

use rand::Rng;

use crate::binomial::prob_at_least_two;
use crate::error::{Result, RigError};
use crate::graph::{project, sample_incidence_sparse_with, Graph, Incidence, RigParams};
use crate::modularity::Partition;
use crate::rng::{rng_from_seed, stream};
use crate::stats::attribute_stats;

/// Which attributes contribute a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionMode {
    /// Attributes whose clique size and exclusive count are both within a
    /// relative `epsilon` of their means `np` and `np e^{-mp}`.
    TheoremThreshold,
    /// Attributes with at least two exclusive members.
    NonemptyExclusive,
}

impl FromStr for PartitionMode {
    type Err = RigError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem_threshold" | "theorem-threshold" => Ok(Self::TheoremThreshold),
            "nonempty_exclusive" | "nonempty-exclusive" => Ok(Self::NonemptyExclusive),
            other => Err(RigError::InvalidParams(format!("unknown partition mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttrPartitionConfig {
    pub epsilon: f64,
    pub mode: PartitionMode,
}

impl AttrPartitionConfig {
    pub fn new(epsilon: f64, mode: PartitionMode) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self { epsilon, mode })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(RigError::InvalidParams(format!(
            "epsilon = {epsilon} is outside (0, 1)"
        )))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttributePartition {
    pub partition: Partition,
    /// Selected attributes (`M_1`), in index order.
    pub selected: Vec<usize>,
    /// Size of the remainder block; zero when it was dropped.
    pub remainder: usize,
}

pub fn build_attribute_partition(
    incidence: &Incidence,
    params: &RigParams,
    config: &AttrPartitionConfig,
) -> Result<AttributePartition> {
    check_epsilon(config.epsilon)?;
    if params.n != incidence.n() || params.m != incidence.m() {
        return Err(RigError::InvalidParams(format!(
            "params (n={}, m={}) do not match the incidence (n={}, m={})",
            params.n,
            params.m,
            incidence.n(),
            incidence.m()
        )));
    }
    let stats = attribute_stats(incidence)?;
    let np = params.np();
    let exclusive_mean = np * (-params.mp()).exp();
    let eps = config.epsilon;
    let selected: Vec<usize> = (0..incidence.m())
        .filter(|&i| {
            let excl = stats.exclusive_sizes[i] as f64;
            let size = stats.sizes[i] as f64;
            match config.mode {
                PartitionMode::TheoremThreshold => {
                    (excl - exclusive_mean).abs() <= eps * exclusive_mean && (size - np).abs() <= eps * np
                }
                PartitionMode::NonemptyExclusive => excl >= 2.0,
            }
        })
        .collect();

    let mut blocks: Vec<Vec<usize>> = selected
        .iter()
        .map(|&i| stats.exclusive[i].clone())
        .filter(|b| !b.is_empty())
        .collect();
    // Exclusive members hold a single attribute, so these blocks are disjoint.
    let mut covered = vec![false; incidence.n()];
    blocks.iter().flatten().for_each(|&v| covered[v] = true);
    let rest: Vec<usize> = (0..incidence.n()).filter(|&v| !covered[v]).collect();
    let remainder = rest.len();
    if !rest.is_empty() {
        blocks.push(rest);
    }
    let partition = Partition::from_blocks(incidence.n(), &blocks)?;
    Ok(AttributePartition {
        partition,
        selected,
        remainder,
    })
}

/// Lower-bound shapes for the modularity of the small-`mp` regime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem1Bounds {
    /// `(1 - 16 eps) e^{-mp}`.
    pub stated: f64,
    /// `(1 - 31 eps) e^{-2mp}`, the bound the construction itself certifies.
    pub proof_level: f64,
    /// `A_eps = 3 eps^{-2} ln(4 / eps^2)`; the bounds apply once
    /// `n p e^{-mp} >= A_eps`.
    pub a_eps: f64,
}

impl Theorem1Bounds {
    pub fn admits(&self, n: usize, m: usize, p: f64) -> bool {
        n as f64 * p * (-(m as f64) * p).exp() >= self.a_eps
    }
}

pub fn theorem1_bounds(m: usize, p: f64, epsilon: f64) -> Result<Theorem1Bounds> {
    check_epsilon(epsilon)?;
    let mp = m as f64 * p;
    Ok(Theorem1Bounds {
        stated: (1.0 - 16.0 * epsilon) * (-mp).exp(),
        proof_level: (1.0 - 31.0 * epsilon) * (-2.0 * mp).exp(),
        a_eps: 3.0 / (epsilon * epsilon) * (4.0 / (epsilon * epsilon)).ln(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingResult {
    pub g: Graph,
    pub g_hat: Graph,
    /// `e(G) - e(Ĝ)`.
    pub delta: usize,
}

pub fn couple_hat(incidence: &Incidence, seed: u64) -> CouplingResult {
    couple_hat_with(&mut rng_from_seed(seed), incidence)
}

pub fn couple_hat_with<R: Rng + ?Sized>(rng: &mut R, incidence: &Incidence) -> CouplingResult {
    let g = project(incidence);
    let g_hat = thin_with(rng, incidence);
    let delta = g.edge_count() - g_hat.edge_count();
    CouplingResult { g, g_hat, delta }
}

/// `Ĝ` alone: one uniform pair from every clique with at least two members.
pub fn thin_with<R: Rng + ?Sized>(rng: &mut R, incidence: &Incidence) -> Graph {
    let mut pairs = Vec::new();
    for members in incidence.iter().filter(|l| l.len() >= 2) {
        let size = members.len();
        let a = rng.random_range(0..size);
        let mut b = rng.random_range(0..size - 1);
        if b >= a {
            b += 1;
        }
        let (u, v) = (members[a], members[b]);
        pairs.push((u.min(v), u.max(v)));
    }
    Graph::from_edges(incidence.n(), pairs).expect("pairs are distinct in-range vertices")
}

/// `q̂ = P(Bin(n, p) >= 2)` and the matched Erdős–Rényi probability
/// `p̄ = 1 - exp(-m q̂ / C(n, 2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchedEr {
    pub q_hat: f64,
    pub p_bar: f64,
}

pub fn matched_er_probability(n: usize, m: usize, p: f64) -> Result<MatchedEr> {
    if n < 2 {
        return Err(RigError::InvalidParams("matched probability needs n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(RigError::InvalidParams(format!("p = {p} is outside [0, 1]")));
    }
    let q_hat = prob_at_least_two(n as u64, p);
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    let p_bar = -(-(m as f64) * q_hat / pairs).exp_m1();
    Ok(MatchedEr { q_hat, p_bar })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapCheck {
    pub threshold: f64,
    pub fraction_within_bound: f64,
    /// Whether `Ĝ ⊆ G` held in every replication.
    pub contained: bool,
    pub deltas: Vec<usize>,
}

/// Runs the coupling `reps` times on edges-only samples and reports how
/// often `Δ <= threshold`.
pub fn coupling_gap_fraction(n: usize, m: usize, p: f64, threshold: f64, reps: usize, seed: u64) -> Result<GapCheck> {
    RigParams::new(n, m, p, seed)?;
    if reps == 0 {
        return Err(RigError::InvalidParams("reps must be at least 1".into()));
    }
    let mut deltas = Vec::with_capacity(reps);
    let mut contained = true;
    for rep in 0..reps {
        let mut rng = stream(seed, &[rep as u64]);
        let incidence = sample_incidence_sparse_with(&mut rng, n, m, p, true);
        let c = couple_hat_with(&mut rng, &incidence);
        contained &= c.g_hat.is_subgraph_of(&c.g);
        deltas.push(c.delta);
    }
    let within = deltas.iter().filter(|&&d| d as f64 <= threshold).count();
    Ok(GapCheck {
        threshold,
        fraction_within_bound: within as f64 / reps as f64,
        contained,
        deltas,
    })
}

/// Fraction of replications with `Δ <= m (np)^{3 - δ}`; requires `np < 1`.
pub fn coupling_gap_check(n: usize, m: usize, p: f64, delta_exp: f64, reps: usize, seed: u64) -> Result<GapCheck> {
    let np = n as f64 * p;
    if np >= 1.0 {
        return Err(RigError::InvalidParams(format!(
            "coupling gap check needs np < 1, got {np}"
        )));
    }
    let threshold = m as f64 * np.powf(3.0 - delta_exp);
    coupling_gap_fraction(n, m, p, threshold, reps, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_incidence;
    use crate::modularity::{exact_modularity, score};
    use proptest::prelude::*;

    fn exclusive_config() -> AttrPartitionConfig {
        AttrPartitionConfig::new(0.3, PartitionMode::NonemptyExclusive).unwrap()
    }

    #[test]
    fn two_exclusive_triangles() {
        let inc = Incidence::from_members(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let params = RigParams::new(6, 2, 0.5, 0).unwrap();
        let ap = build_attribute_partition(&inc, &params, &exclusive_config()).unwrap();
        assert_eq!(ap.partition.blocks(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(ap.remainder, 0);
        let g = project(&inc);
        let s = score(&g, &ap.partition).unwrap().score;
        assert!((s - 0.5).abs() < 1e-15);
        assert!((s - exact_modularity(&g, 11).unwrap().score).abs() < 1e-15);
    }

    #[test]
    fn shared_vertices_fall_into_remainder() {
        let inc = Incidence::from_members(4, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]).unwrap();
        let params = RigParams::new(4, 2, 1.0, 0).unwrap();
        let ap = build_attribute_partition(&inc, &params, &exclusive_config()).unwrap();
        assert_eq!(ap.partition, Partition::trivial(4));
        assert!(ap.selected.is_empty());
    }

    #[test]
    fn threshold_mode_gates_on_both_counts() {
        // np = 3 and np e^{-mp} = 3 e^{-0.6} ~ 1.646; with eps = 0.5 the windows
        // are [1.5, 4.5] for V_i and [0.82, 2.47] for the exclusive count.
        let inc = Incidence::from_members(10, vec![vec![0, 1, 2], vec![0, 3, 4, 5]]).unwrap();
        let params = RigParams::new(10, 2, 0.3, 0).unwrap();
        let cfg = AttrPartitionConfig::new(0.5, PartitionMode::TheoremThreshold).unwrap();
        let ap = build_attribute_partition(&inc, &params, &cfg).unwrap();
        assert_eq!(ap.selected, vec![0]);
        assert_eq!(ap.partition.blocks(), vec![vec![1, 2], vec![0, 3, 4, 5, 6, 7, 8, 9]]);
        assert_eq!(ap.remainder, 8);

        let loose = build_attribute_partition(&inc, &params, &exclusive_config()).unwrap();
        assert_eq!(loose.selected, vec![0, 1]);
        assert_eq!(loose.partition.block_count(), 3);
    }

    #[test]
    fn rejects_edges_only_and_bad_config() {
        let params = RigParams::new(50, 100, 0.05, 3).unwrap();
        let e = crate::graph::sample_incidence_sparse(&params, true).unwrap();
        assert!(matches!(
            build_attribute_partition(&e, &params, &exclusive_config()),
            Err(RigError::EdgesOnlyIncidence)
        ));
        assert!(AttrPartitionConfig::new(1.0, PartitionMode::NonemptyExclusive).is_err());
        assert!("bogus".parse::<PartitionMode>().is_err());
    }

    #[test]
    fn theorem1_values() {
        let b = theorem1_bounds(100, 0.0, 0.1).unwrap();
        assert!((b.a_eps - 300.0 * 400f64.ln()).abs() < 1e-9);
        assert!((b.a_eps - 1797.44).abs() < 0.01);
        assert!((b.stated - (1.0 - 1.6)).abs() < 1e-15);
        assert!((b.proof_level - (1.0 - 3.1)).abs() < 1e-15);
        let b = theorem1_bounds(1000, 1e-4, 0.01).unwrap();
        assert!((b.proof_level - 0.69 * (-0.2f64).exp()).abs() < 1e-12);
        assert!((b.proof_level - 0.565).abs() < 1e-3);
        assert!(!b.admits(10_000, 1000, 1e-4));
        assert!(theorem1_bounds(10, 0.1, 0.0).is_err());
    }

    #[test]
    fn coupling_examples() {
        let singles = Incidence::from_members(4, vec![vec![0], vec![], vec![3]]).unwrap();
        let c = couple_hat(&singles, 1);
        assert_eq!((c.g_hat.edge_count(), c.delta, c.g.edge_count()), (0, 0, 0));

        let pair = Incidence::from_members(2, vec![vec![0, 1]]).unwrap();
        let c = couple_hat(&pair, 1);
        assert_eq!(c.g_hat, c.g);
        assert_eq!(c.delta, 0);
    }

    #[test]
    fn matched_er_examples() {
        let z = matched_er_probability(10, 5, 0.0).unwrap();
        assert_eq!((z.q_hat, z.p_bar), (0.0, 0.0));
        let full = matched_er_probability(2, 3, 1.0).unwrap();
        assert_eq!(full.q_hat, 1.0);
        assert!((full.p_bar - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
        for &p in &[1e-4, 1e-5] {
            let n = 100usize;
            let q = matched_er_probability(n, 1, p).unwrap().q_hat;
            let leading = (n * (n - 1) / 2) as f64 * p * p;
            assert!((q / leading - 1.0).abs() <= 2.0 * n as f64 * p, "p = {p}");
        }
        assert!(matched_er_probability(1, 5, 0.1).is_err());
    }

    #[test]
    fn matched_er_is_monotone() {
        let mut last = 0.0;
        for m in [1, 10, 100, 1000, 10_000] {
            let p_bar = matched_er_probability(50, m, 0.01).unwrap().p_bar;
            assert!(p_bar >= last);
            last = p_bar;
        }
        let mut last = 0.0;
        for p in [0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0] {
            let p_bar = matched_er_probability(50, 20, p).unwrap().p_bar;
            assert!(p_bar >= last);
            last = p_bar;
        }
    }

    #[test]
    fn gap_check_edges() {
        let zero = coupling_gap_check(1000, 10_000, 0.0, 0.5, 5, 1).unwrap();
        assert_eq!(zero.fraction_within_bound, 1.0);
        let negative = coupling_gap_fraction(500, 5000, 0.001, -1.0, 5, 1).unwrap();
        assert_eq!(negative.fraction_within_bound, 0.0);
        assert!(coupling_gap_check(100, 10, 0.02, 0.5, 3, 1).is_err());
        assert!(coupling_gap_fraction(100, 10, 0.001, 1.0, 0, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]
        #[test]
        fn coupling_invariants(n in 2usize..40, m in 1usize..60, p in 0.0f64..0.4, seed: u64) {
            let inc = sample_incidence(&RigParams::new(n, m, p, seed).unwrap()).unwrap();
            let c = couple_hat(&inc, seed ^ 1);
            prop_assert!(c.g_hat.is_subgraph_of(&c.g));
            prop_assert_eq!(&c.g, &project(&inc));
            let big = inc.iter().filter(|l| l.len() >= 2).count();
            prop_assert!(c.g_hat.edge_count() <= big);
            prop_assert_eq!(c.delta, c.g.edge_count() - c.g_hat.edge_count());
        }

        #[test]
        fn attribute_partition_is_valid(n in 1usize..60, m in 1usize..30, p in 0.0f64..0.3, seed: u64, strict: bool) {
            let params = RigParams::new(n, m, p, seed).unwrap();
            let inc = sample_incidence(&params).unwrap();
            let mode = if strict { PartitionMode::TheoremThreshold } else { PartitionMode::NonemptyExclusive };
            let ap = build_attribute_partition(&inc, &params, &AttrPartitionConfig::new(0.5, mode).unwrap()).unwrap();
            prop_assert_eq!(ap.partition.n(), n);
            let counts = inc.vertex_attr_counts();
            let blocks = ap.partition.blocks();
            let attr_blocks = if ap.remainder > 0 { &blocks[..blocks.len() - 1] } else { &blocks[..] };
            for block in attr_blocks {
                prop_assert!(block.iter().all(|&v| counts[v] == 1));
            }
        }
    }
}
