use rand::seq::index;
use rand::Rng;

use super::{Graph, Incidence, IncidenceBuilder, RigParams};
use crate::binomial::{self, TruncatedBinomial};
use crate::error::{Result, RigError};
use crate::rng::rng_from_seed;

/// Calls `visit` for every success of `len` independent Bernoulli(`p`)
/// trials, jumping over failures with geometric gaps.
fn for_each_success<R, F>(rng: &mut R, len: usize, p: f64, mut visit: F)
where
    R: Rng + ?Sized,
    F: FnMut(usize),
{
    if p <= 0.0 || len == 0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(visit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut pos = -1.0f64;
    loop {
        // 1 - U lies in (0, 1], so the logarithm is finite.
        let u = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        pos += 1.0 + gap;
        if pos >= len as f64 {
            break;
        }
        visit(pos as usize);
    }
}

/// Samples the incidence of `G(n, m, p)` with one Bernoulli(`p`) draw per
/// vertex–attribute cell, seeded by `params.seed`.
pub fn sample_incidence(params: &RigParams) -> Result<Incidence> {
    params.validate()?;
    Ok(sample_incidence_with(
        &mut rng_from_seed(params.seed),
        params.n,
        params.m,
        params.p,
    ))
}

pub fn sample_incidence_with<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, p: f64) -> Incidence {
    let mut builder = IncidenceBuilder::new(n, m, false);
    let mut list = Vec::new();
    for _ in 0..m {
        list.clear();
        for_each_success(rng, n, p, |v| list.push(v));
        builder.push_sorted(&list);
    }
    builder.finish()
}

/// Sampler for very large `m`.
///
/// With `edges_only = false` every attribute draws its clique size from
/// `Bin(n, p)` and a uniform member set of that size. With `edges_only =
/// true` only the number of attributes with at least two members is drawn,
/// from `Bin(m, P(Bin(n, p) >= 2))`, and each retained attribute gets a size
/// from the truncated binomial. Attributes of size 0 or 1 do not affect the
/// projected graph, so both variants project to `G(n, m, p)`.
pub fn sample_incidence_sparse(params: &RigParams, edges_only: bool) -> Result<Incidence> {
    params.validate()?;
    Ok(sample_incidence_sparse_with(
        &mut rng_from_seed(params.seed),
        params.n,
        params.m,
        params.p,
        edges_only,
    ))
}

pub fn sample_incidence_sparse_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    p: f64,
    edges_only: bool,
) -> Incidence {
    let mut builder = IncidenceBuilder::new(n, m, edges_only);
    let push_uniform = |rng: &mut R, builder: &mut IncidenceBuilder, size: usize| {
        let mut list = if size == n {
            (0..n).collect::<Vec<_>>()
        } else {
            index::sample(rng, n, size).into_vec()
        };
        list.sort_unstable();
        builder.push_sorted(&list);
    };
    if !edges_only {
        for _ in 0..m {
            let size = binomial::sample(rng, n as u64, p) as usize;
            push_uniform(rng, &mut builder, size);
        }
        return builder.finish();
    }
    let q2 = binomial::prob_at_least_two(n as u64, p);
    if q2 <= 0.0 {
        return builder.finish();
    }
    let retained = binomial::sample(rng, m as u64, q2) as usize;
    let sizes = TruncatedBinomial::new(n as u64, p);
    for _ in 0..retained {
        let size = sizes.sample(rng) as usize;
        push_uniform(rng, &mut builder, size);
    }
    builder.finish()
}

/// The intersection graph: the union of the cliques on every member list.
pub fn project(incidence: &Incidence) -> Graph {
    let pair_count: usize = incidence.iter().map(|l| l.len() * l.len().saturating_sub(1) / 2).sum();
    let mut pairs = Vec::with_capacity(pair_count);
    for list in incidence.iter() {
        for (a, &u) in list.iter().enumerate() {
            for &v in &list[a + 1..] {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_pairs(incidence.n(), pairs)
}

/// Samples `G(n, q)`, seeded by `seed`.
pub fn sample_er(n: usize, q: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(RigError::InvalidParams(format!(
            "edge probability {q} is outside [0, 1]"
        )));
    }
    Ok(sample_er_with(&mut rng_from_seed(seed), n, q))
}

/// Geometric skipping over the pairs `(w, v)`, `w < v`, ordered by `v` then `w`.
pub fn sample_er_with<R: Rng + ?Sized>(rng: &mut R, n: usize, q: f64) -> Graph {
    if n < 2 || q <= 0.0 {
        return Graph::empty(n);
    }
    if q >= 1.0 {
        return Graph::complete(n);
    }
    let log_q = (-q).ln_1p();
    let mut pairs = Vec::new();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let u = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        // Gaps past the remaining pair count end the walk.
        if gap >= (n * n) as f64 {
            break;
        }
        w += 1 + gap as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            pairs.push((w as usize, v));
        }
    }
    Graph::from_pairs(n, pairs)
}

/// Closed-form quantities of `G(n, m, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelMoments {
    /// Marginal edge probability `1 - (1 - p^2)^m`.
    pub p_hat: f64,
    /// `n m p^2`.
    pub d: f64,
    /// `C(n, 2) p_hat`.
    pub expected_edges: f64,
}

pub fn model_moments(n: usize, m: usize, p: f64) -> ModelMoments {
    let p2 = p * p;
    let mp2 = m as f64 * p2;
    let p_hat = if p2 >= 1.0 {
        1.0
    } else if mp2 < 1e-12 {
        // Relative error of this first-order term is below m p^2 / 2.
        mp2
    } else {
        -(m as f64 * (-p2).ln_1p()).exp_m1()
    };
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    ModelMoments {
        p_hat,
        d: n as f64 * mp2,
        expected_edges: pairs * p_hat,
    }
}
