//! Extinction probability of the construction, analytically (least root of
//! the offspring generating polynomial) and by Monte Carlo.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::derive_seed;
use crate::error::{Error, Result};
use crate::percolation::{survives_to, PercolationParams};

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionReport {
    pub analytic_q: f64,
    pub empirical_q: f64,
    pub trials: u64,
    pub depth: u32,
}

/// `f(t) = -t + Σ_k P(N = k) t^k` with `N ~ Binomial(children, p)`, which
/// collapses to `(1 - p + p t)^children - t`.
pub fn offspring_polynomial(children: u64, p: f64, t: f64) -> f64 {
    (1.0 - p + p * t).powf(children as f64) - t
}

fn children_for(n: u32, ambient_dim: u8) -> Result<u64> {
    if n < 2 {
        return Err(Error::usage(format!("n must be >= 2, got {n}")));
    }
    match ambient_dim {
        1 => Ok(u64::from(n)),
        2 => Ok(u64::from(n) * u64::from(n)),
        d => Err(Error::usage(format!("ambient_dim must be 1 or 2, got {d}"))),
    }
}

/// Least root in `[0, 1]` of the offspring polynomial. Equals 1 exactly when
/// the mean offspring count `children · p` is at most 1.
pub fn extinction_analytic(n: u32, p: f64, ambient_dim: u8) -> Result<f64> {
    let children = children_for(n, ambient_dim)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::usage(format!("p must lie in [0,1], got {p}")));
    }
    let c = children as f64;
    if c * p <= 1.0 {
        return Ok(1.0);
    }
    if p >= 1.0 {
        return Ok(0.0);
    }
    let f = |t: f64| offspring_polynomial(children, p, t);
    // f is convex with f(1) = 0 and f'(1) > 0; its minimum sits at t_min < 1
    // where f < 0, and f(0) = (1-p)^c > 0, so [0, t_min] brackets the root.
    let t_min = (((1.0 / (c * p)).powf(1.0 / (c - 1.0))) - (1.0 - p)) / p;
    let (mut lo, mut hi) = (0.0_f64, t_min.clamp(0.0, 1.0));
    if f(hi) >= 0.0 {
        // Only reachable when the minimum is numerically indistinguishable
        // from zero, i.e. barely supercritical.
        return Ok(hi);
    }
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fraction of `trials` constructions whose level `depth` is empty. Trial
/// `i` uses seed `derive_seed(params.seed, i)`.
pub fn extinction_monte_carlo(params: &PercolationParams, depth: u32, trials: u64) -> Result<ExtinctionReport> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::usage("trials must be >= 1"));
    }
    let analytic_q = extinction_analytic(params.n, params.p, params.ambient_dim)?;
    let extinct: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial = params.with_seed(derive_seed(params.seed, i));
            extinct_by(&trial, depth).map(u64::from)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(ExtinctionReport {
        analytic_q,
        empirical_q: extinct as f64 / trials as f64,
        trials,
        depth,
    })
}

fn extinct_by(params: &PercolationParams, depth: u32) -> Result<bool> {
    survives_to(params, depth).map(|alive| !alive)
}
