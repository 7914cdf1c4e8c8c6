//! Clique-cover statistics of an incidence.
//!
//! Every attribute spans a clique in the projected graph. These statistics
//! describe how the cliques overlap and how they meet a vertex subset, and
//! bound the subset's edge counts and volume from the attribute view alone.

use std::io::Write;

use crate::error::{Result, RigError};
use crate::graph::Incidence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeStats {
    /// `V_i`.
    pub sizes: Vec<usize>,
    /// Members of attribute `i` that hold no other attribute.
    pub exclusive: Vec<Vec<usize>>,
    pub exclusive_sizes: Vec<usize>,
}

pub fn attribute_stats(incidence: &Incidence) -> Result<AttributeStats> {
    incidence.require_full()?;
    let counts = incidence.vertex_attr_counts();
    let exclusive: Vec<Vec<usize>> = incidence
        .iter()
        .map(|members| members.iter().copied().filter(|&v| counts[v] == 1).collect())
        .collect();
    Ok(AttributeStats {
        sizes: incidence.sizes(),
        exclusive_sizes: exclusive.iter().map(Vec::len).collect(),
        exclusive,
    })
}

/// Per-attribute intersections with a subset `S` and its complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetCounts {
    /// `S`, sorted and deduplicated.
    pub subset: Vec<usize>,
    /// `X_{i,S}`.
    pub x: Vec<usize>,
    /// `X_{i,S̄}`.
    pub y: Vec<usize>,
}

fn subset_mask(n: usize, subset: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(RigError::InvalidParams(format!("vertex {v} outside [0, {n})")));
        }
        mask[v] = true;
    }
    Ok(mask)
}

pub fn subset_counts(incidence: &Incidence, subset: &[usize]) -> Result<SubsetCounts> {
    let mask = subset_mask(incidence.n(), subset)?;
    let (x, y) = incidence
        .iter()
        .map(|members| {
            let inside = members.iter().filter(|&&v| mask[v]).count();
            (inside, members.len() - inside)
        })
        .unzip();
    let subset = (0..incidence.n()).filter(|&v| mask[v]).collect();
    Ok(SubsetCounts { subset, x, y })
}

/// Pair coverage of the attribute cliques.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCover {
    /// `E1`: vertex pairs that lie together in at least two attributes.
    pub double_covered: u64,
    /// `sum over pairs of (multiplicity - 1)`; equals `E1` unless some pair is
    /// covered three or more times, and `sum_i C(V_i, 2) - excess = e(G)`.
    pub excess: u64,
}

pub fn pair_cover(incidence: &Incidence) -> PairCover {
    let n = incidence.n() as u64;
    let mut keys: Vec<u64> = Vec::new();
    for members in incidence.iter() {
        for (a, &u) in members.iter().enumerate() {
            keys.extend(members[a + 1..].iter().map(|&v| u as u64 * n + v as u64));
        }
    }
    keys.sort_unstable();
    let mut cover = PairCover {
        double_covered: 0,
        excess: 0,
    };
    for run in keys.chunk_by(|a, b| a == b).filter(|run| run.len() >= 2) {
        cover.double_covered += 1;
        cover.excess += run.len() as u64 - 1;
    }
    cover
}

/// `E1`: vertex pairs that lie together in at least two attributes.
pub fn e1_count(incidence: &Incidence) -> u64 {
    pair_cover(incidence).double_covered
}

/// Upper bound `n^2 m^2 p^4` on the mean of `E1`.
pub fn e1_mean_bound(n: usize, m: usize, p: f64) -> f64 {
    let nmp2 = n as f64 * m as f64 * p * p;
    nmp2 * nmp2
}

/// `E2 = sum_i V_i (V_i - 1) 1{V_i > threshold}`.
pub fn e2_count(incidence: &Incidence, threshold: usize) -> Result<u64> {
    if threshold < 1 {
        return Err(RigError::InvalidParams(
            "truncation threshold must be at least 1".into(),
        ));
    }
    Ok(incidence
        .iter()
        .map(|members| members.len() as u64)
        .filter(|&v| v > threshold as u64)
        .map(|v| v * (v - 1))
        .sum())
}

/// Clique-cover bounds for a subset `S`.
///
/// The lower bounds subtract the excess cover count, which coincides with
/// `E1` when no pair is covered more than twice and keeps the bounds valid
/// when some pair is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CliqueBounds {
    /// `sum_i C(X_{i,S}, 2) >= e(S)`.
    pub es_upper: u64,
    /// `sum_i X_{i,S} X_{i,S̄} - excess <= e(S, S̄)`.
    pub cross_lower: i64,
    /// `sum_i X_{i,S} (V_i - 1) - 2 excess <= vol(S)`.
    pub vol_lower: i64,
    pub e1: u64,
    pub excess: u64,
}

pub fn clique_bounds(incidence: &Incidence, subset: &[usize]) -> Result<CliqueBounds> {
    let counts = subset_counts(incidence, subset)?;
    let cover = pair_cover(incidence);
    let excess = cover.excess as i64;
    let mut es_upper = 0u64;
    let mut cross = 0i64;
    let mut vol = 0i64;
    for (&x, &y) in counts.x.iter().zip(&counts.y) {
        let (x, y) = (x as i64, y as i64);
        es_upper += (x * (x - 1).max(0) / 2) as u64;
        cross += x * y;
        vol += x * (x + y - 1).max(0);
    }
    Ok(CliqueBounds {
        es_upper,
        cross_lower: cross - excess,
        vol_lower: vol - 2 * excess,
        e1: cover.double_covered,
        excess: cover.excess,
    })
}

/// Attribute counts used to inspect the large-`np` regime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegimeDiagnostics {
    /// `|M_S|`: attributes with `|X_{i,S} - s p| >= eps s p`.
    pub deviating: usize,
    /// Attributes outside `M_S`.
    pub within: usize,
    /// `(k, N_k)` with `N_k = #{i : V_i >= k n p}`, for `k = 5..=k_max`.
    pub heavy: Vec<(usize, usize)>,
}

pub fn regime_diagnostics(
    incidence: &Incidence,
    p: f64,
    subset: &[usize],
    epsilon: f64,
    k_max: usize,
) -> Result<RegimeDiagnostics> {
    incidence.require_full()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(RigError::InvalidParams(format!(
            "epsilon = {epsilon} is outside (0, 1)"
        )));
    }
    if k_max < 5 {
        return Err(RigError::InvalidParams(format!("k_max = {k_max} is below 5")));
    }
    let counts = subset_counts(incidence, subset)?;
    let sp = counts.subset.len() as f64 * p;
    let deviating = if sp == 0.0 {
        0
    } else {
        counts
            .x
            .iter()
            .filter(|&&x| (x as f64 - sp).abs() >= epsilon * sp)
            .count()
    };
    let np = incidence.n() as f64 * p;
    let sizes = incidence.sizes();
    let heavy = (5..=k_max)
        .map(|k| (k, sizes.iter().filter(|&&v| v as f64 >= k as f64 * np).count()))
        .collect();
    Ok(RegimeDiagnostics {
        deviating,
        within: incidence.m() - deviating,
        heavy,
    })
}

/// Summary of an incidence as `key=value` lines.
pub fn write_summary<W: Write>(incidence: &Incidence, threshold: usize, mut out: W) -> Result<()> {
    let sizes = incidence.sizes();
    let pairs: u64 = sizes.iter().map(|&v| (v * v.saturating_sub(1) / 2) as u64).sum();
    writeln!(out, "n={}", incidence.n())?;
    writeln!(out, "m={}", incidence.m())?;
    writeln!(out, "stored_attributes={}", incidence.stored_attributes())?;
    writeln!(out, "edges_only={}", incidence.is_edges_only())?;
    writeln!(out, "memberships={}", incidence.total_memberships())?;
    writeln!(out, "clique_pairs={pairs}")?;
    let cover = pair_cover(incidence);
    writeln!(out, "e1={}", cover.double_covered)?;
    writeln!(out, "cover_excess={}", cover.excess)?;
    writeln!(out, "e2={}", e2_count(incidence, threshold)?)?;
    writeln!(out, "e2_threshold={threshold}")?;
    if let Ok(stats) = attribute_stats(incidence) {
        let exclusive: usize = stats.exclusive_sizes.iter().sum();
        writeln!(out, "exclusive_members={exclusive}")?;
        writeln!(
            out,
            "attributes_with_exclusive={}",
            stats.exclusive_sizes.iter().filter(|&&s| s > 0).count()
        )?;
    }
    Ok(())
}
