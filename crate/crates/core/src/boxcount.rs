//! Box-counting and mass-exponent dimension estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridset::GridSet;
use crate::percolation::{level_counts, surviving_seeds, survives_to, PercolationParams, PercolationTree};

/// Least-squares line through `(x, y)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let m = xs.len();
    if m < 2 {
        return None;
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Some(LineFit { slope, intercept, residual: (ss / mf).sqrt() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountReport {
    pub n: u32,
    pub levels: Vec<u32>,
    /// Box sides `n^-j`.
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    /// Fitted slope of `log count` against `log n^j`; absent for one scale.
    pub slope: Option<f64>,
    pub fit_residual: Option<f64>,
}

impl BoxCountReport {
    /// CSV with columns `level,scale,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,scale,count\n");
        for ((j, s), c) in self.levels.iter().zip(&self.scales).zip(&self.counts) {
            out.push_str(&format!("{j},{s},{c}\n"));
        }
        out
    }
}

/// Occupied level-`j` boxes of `set` for `j_min ≤ j ≤ j_max` and the
/// log-log slope.
pub fn box_count(set: &GridSet, j_min: u32, j_max: u32) -> Result<BoxCountReport> {
    if set.is_empty() {
        return Err(Error::EmptySet("box counting an empty set".into()));
    }
    if j_min < 1 || j_min > j_max {
        return Err(Error::usage(format!("scale window {j_min}..={j_max} is invalid; need 1 <= j_min <= j_max")));
    }
    if j_max > set.level {
        return Err(Error::usage(format!("j_max = {j_max} exceeds the set's level {}", set.level)));
    }
    let levels: Vec<u32> = (j_min..=j_max).collect();
    let counts: Vec<u64> = levels.iter().map(|&j| set.count_at(j)).collect();
    let ln_n = f64::from(set.n).ln();
    let xs: Vec<f64> = levels.iter().map(|&j| f64::from(j) * ln_n).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = fit_line(&xs, &ys);
    Ok(BoxCountReport {
        n: set.n,
        scales: levels.iter().map(|&j| f64::from(set.n).powi(-(j as i32))).collect(),
        levels,
        counts,
        slope: fit.map(|f| f.slope),
        fit_residual: fit.map(|f| f.residual),
    })
}

/// Default fitting window: drop level 1, and level 2 as well when at least
/// three levels remain.
pub fn default_window(level: u32) -> (u32, u32) {
    let j_min = if level >= 5 { 3 } else { 2 };
    (j_min.min(level.max(1)), level.max(1))
}

/// `log(count) / (k log n)`.
pub fn mass_dimension_from_count(count: u64, n: u32, level: u32) -> Result<f64> {
    if count == 0 {
        return Err(Error::EmptySet(format!("level {level} is empty")));
    }
    if level == 0 {
        return Err(Error::usage("mass dimension needs level >= 1"));
    }
    if let Some(e) = exact_log(count, n) {
        return Ok(f64::from(e) / f64::from(level));
    }
    Ok((count as f64).ln() / (f64::from(level) * f64::from(n).ln()))
}

/// `e` with `n^e == count`, when there is one.
fn exact_log(count: u64, n: u32) -> Option<u32> {
    let (mut v, mut e) = (1u64, 0u32);
    while v < count {
        v = v.checked_mul(u64::from(n))?;
        e += 1;
    }
    (v == count).then_some(e)
}

pub fn mass_dimension(tree: &PercolationTree, level: u32) -> Result<f64> {
    if level > tree.depth() {
        return Err(Error::usage(format!("level {level} exceeds tree depth {}", tree.depth())));
    }
    mass_dimension_from_count(tree.kept(level).len() as u64, tree.params().n, level)
}

/// Mass-dimension estimates over surviving constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassSurvey {
    pub depth: u32,
    pub seeds: Vec<u64>,
    pub estimates: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    /// Seeds discarded because their level `depth` was empty.
    pub rejected: u64,
}

/// Mean of `mass_dimension` at `depth` over `trees` surviving constructions
/// with seeds derived from `params.seed`, conditioning on survival by
/// rejection.
pub fn mass_dimension_survey(params: &PercolationParams, depth: u32, trees: usize, max_attempts: u64) -> Result<MassSurvey> {
    params.validate()?;
    if trees == 0 {
        return Err(Error::usage("trees must be >= 1"));
    }
    let (seeds, rejected) = surviving_seeds(params.seed, trees, max_attempts, |s| survives_to(&params.with_seed(s), depth))?;
    let estimates: Vec<f64> = seeds
        .par_iter()
        .map(|&s| {
            let counts = level_counts(&params.with_seed(s), depth)?;
            mass_dimension_from_count(counts[depth as usize], params.n, depth)
        })
        .collect::<Result<_>>()?;
    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let var = if estimates.len() > 1 {
        estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok(MassSurvey { depth, seeds, estimates, mean, std_dev: var.sqrt(), rejected })
}
