//! Binomial helpers shared by the sparse sampler and the coupling.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Largest clique size covered by the inverse-transform table of
/// [`TruncatedBinomial`].
pub const TABLE_MAX: usize = 64;

/// `ln P(Bin(n, p) = k)` for `0 < p < 1`.
pub fn ln_pmf(n: u64, p: f64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    // Exact summation is fine for the small k used here; larger k goes
    // through the Stirling series.
    if k < 64 {
        (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

fn ln_factorial(n: u64) -> f64 {
    if n < 32 {
        return (2..=n).map(|i| (i as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Γ(x).
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// `P(Bin(n, p) >= 2) = 1 - (1-p)^n - n p (1-p)^(n-1)`, evaluated without
/// cancellation for small `n p`.
pub fn prob_at_least_two(n: u64, p: f64) -> f64 {
    if n < 2 || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let np = n as f64 * p;
    if np < 1.0 {
        let ratio = p / (1.0 - p);
        let mut term = (ln_choose(n, 2) + 2.0 * p.ln() + (n - 2) as f64 * (-p).ln_1p()).exp();
        let mut sum = 0.0;
        let mut k = 2u64;
        loop {
            sum += term;
            if k >= n || term < 1e-18 * sum {
                break;
            }
            term *= (n - k) as f64 / (k + 1) as f64 * ratio;
            k += 1;
        }
        sum.min(1.0)
    } else {
        let a = n as f64 * (-p).ln_1p();
        let x = np / (1.0 - p);
        (-(a + x.ln_1p()).exp_m1()).clamp(0.0, 1.0)
    }
}

/// Draws from `Bin(n, p)`.
pub fn sample<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p checked in (0,1)").sample(rng)
}

/// `Bin(n, p)` conditioned on being at least 2.
///
/// Values up to [`TABLE_MAX`] come from inverse transform over a cached
/// conditional CDF; the remaining tail is drawn by rejection from the
/// unconditioned binomial.
#[derive(Clone, Debug)]
pub struct TruncatedBinomial {
    n: u64,
    p: f64,
    /// `cdf[j]` = P(V <= j + 2 | V >= 2), for j + 2 <= min(n, TABLE_MAX).
    cdf: Vec<f64>,
}

impl TruncatedBinomial {
    pub fn new(n: u64, p: f64) -> Self {
        assert!(n >= 2 && p > 0.0, "truncated binomial needs n >= 2 and p > 0");
        if p >= 1.0 {
            return Self {
                n,
                p: 1.0,
                cdf: Vec::new(),
            };
        }
        let q2 = prob_at_least_two(n, p);
        let top = n.min(TABLE_MAX as u64);
        let mut cdf = Vec::with_capacity(top as usize - 1);
        let mut acc = 0.0;
        for k in 2..=top {
            acc += ln_pmf(n, p, k).exp() / q2;
            cdf.push(acc.min(1.0));
        }
        if top == n {
            if let Some(last) = cdf.last_mut() {
                *last = 1.0;
            }
        }
        Self { n, p, cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.p >= 1.0 {
            return self.n;
        }
        let u: f64 = rng.random();
        if let Some(&covered) = self.cdf.last() {
            if u < covered {
                let j = self.cdf.partition_point(|&c| c <= u);
                return j as u64 + 2;
            }
        }
        let floor = TABLE_MAX as u64 + 1;
        loop {
            let v = sample(rng, self.n, self.p);
            if v >= floor {
                return v;
            }
        }
    }
}
