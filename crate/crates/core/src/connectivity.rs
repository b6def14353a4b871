//! Clusters of side-adjacent kept cells, left-right crossings and the
//! crossing-probability sweep.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::derive_seed;
use crate::error::{Error, Result};
use crate::percolation::{generate_coupled, CellIndex, PercolationParams, PercolationTree};

/// Weighted quick-union with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Returns `true` if `a` and `b` were in different sets.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn set_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub level: u32,
    pub component_count: usize,
    pub largest_size: usize,
    pub crossing_lr: bool,
    pub crossing_tb: bool,
}

/// Position lookup for a sorted set of same-level cells.
enum CellLookup {
    Dense { side: u64, slots: Vec<u32> },
    Sparse(HashMap<(u64, u64), u32>),
}

const DENSE_LIMIT: u64 = 1 << 24;

impl CellLookup {
    fn new(cells: &[CellIndex], side: u64) -> Self {
        if side.saturating_mul(side) <= DENSE_LIMIT {
            let mut slots = vec![u32::MAX; (side * side) as usize];
            for (i, c) in cells.iter().enumerate() {
                slots[(c.y * side + c.x) as usize] = i as u32;
            }
            CellLookup::Dense { side, slots }
        } else {
            CellLookup::Sparse(cells.iter().enumerate().map(|(i, c)| ((c.x, c.y), i as u32)).collect())
        }
    }

    fn get(&self, x: u64, y: u64) -> Option<u32> {
        match self {
            CellLookup::Dense { side, slots } => {
                if x >= *side || y >= *side {
                    return None;
                }
                let v = slots[(y * side + x) as usize];
                (v != u32::MAX).then_some(v)
            }
            CellLookup::Sparse(m) => m.get(&(x, y)).copied(),
        }
    }
}

fn check_same_level(cells: &[CellIndex]) -> Result<u32> {
    let level = cells.first().map(|c| c.level).unwrap_or(0);
    if cells.iter().any(|c| c.level != level) {
        return Err(Error::usage("cells must all belong to one level"));
    }
    Ok(level)
}

/// Component analysis of an arbitrary set of same-level cells on the base-`n`
/// grid. Cells are adjacent iff they share a side of positive length.
pub fn components_of(cells: &[CellIndex], n: u32) -> Result<ComponentReport> {
    let level = check_same_level(cells)?;
    let side = CellIndex::side_count(n, level);
    let lookup = CellLookup::new(cells, side);
    let mut uf = UnionFind::new(cells.len());
    for (i, c) in cells.iter().enumerate() {
        if let Some(j) = lookup.get(c.x + 1, c.y) {
            uf.union(i as u32, j);
        }
        if let Some(j) = lookup.get(c.x, c.y + 1) {
            uf.union(i as u32, j);
        }
    }
    let mut roots: HashMap<u32, [bool; 4]> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let r = uf.find(i as u32);
        let flags = roots.entry(r).or_insert([false; 4]);
        flags[0] |= c.x == 0;
        flags[1] |= c.x == side - 1;
        flags[2] |= c.y == 0;
        flags[3] |= c.y == side - 1;
    }
    let largest_size = roots.keys().map(|&r| uf.set_size(r) as usize).max().unwrap_or(0);
    Ok(ComponentReport {
        level,
        component_count: roots.len(),
        largest_size,
        crossing_lr: roots.values().any(|f| f[0] && f[1]),
        crossing_tb: roots.values().any(|f| f[2] && f[3]),
    })
}

/// Components of the kept level-`level` cells of a two-dimensional tree.
pub fn components(tree: &PercolationTree, level: u32) -> Result<ComponentReport> {
    if tree.params().ambient_dim != 2 {
        return Err(Error::usage("component analysis needs a two-dimensional tree"));
    }
    if level > tree.depth() {
        return Err(Error::usage(format!("level {level} exceeds tree depth {}", tree.depth())));
    }
    let mut report = components_of(tree.kept(level), tree.params().n)?;
    report.level = level;
    Ok(report)
}

/// Whether a left-right crossing exists; cheaper than a full report.
pub fn crosses_lr(cells: &[CellIndex], n: u32) -> Result<bool> {
    Ok(components_of(cells, n)?.crossing_lr)
}

/// Shortest left-to-right path of side-adjacent cells, found by a
/// multi-source breadth-first search from the left column. A shortest path
/// never revisits a cell, so it is already a valid walk.
pub fn crossing_witness(cells: &[CellIndex], n: u32) -> Result<Option<Vec<CellIndex>>> {
    let level = check_same_level(cells)?;
    let side = CellIndex::side_count(n, level);
    let lookup = CellLookup::new(cells, side);
    let mut prev = vec![u32::MAX; cells.len()];
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::new();
    for (i, c) in cells.iter().enumerate() {
        if c.x == 0 {
            seen[i] = true;
            queue.push_back(i as u32);
        }
    }
    while let Some(i) = queue.pop_front() {
        let c = cells[i as usize];
        if c.x == side - 1 {
            let mut path = vec![c];
            let mut cur = i;
            while prev[cur as usize] != u32::MAX {
                cur = prev[cur as usize];
                path.push(cells[cur as usize]);
            }
            path.reverse();
            return Ok(Some(path));
        }
        let mut visit = |x: u64, y: u64| {
            if let Some(j) = lookup.get(x, y) {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    prev[j as usize] = i;
                    queue.push_back(j);
                }
            }
        };
        visit(c.x + 1, c.y);
        if c.x > 0 {
            visit(c.x - 1, c.y);
        }
        visit(c.x, c.y + 1);
        if c.y > 0 {
            visit(c.x, c.y - 1);
        }
    }
    Ok(None)
}

/// Empirical `p ↦ P(left-right crossing at depth)` curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub n: u32,
    pub p_values: Vec<f64>,
    pub crossing_freq: Vec<f64>,
    pub depth: u32,
    pub trials: u64,
    pub master_seed: u64,
}

impl SweepCurve {
    pub fn is_monotone(&self) -> bool {
        self.crossing_freq.windows(2).all(|w| w[0] <= w[1])
    }

    /// CSV with columns `p,depth,trials,crossing_freq`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,depth,trials,crossing_freq\n");
        for (p, f) in self.p_values.iter().zip(&self.crossing_freq) {
            out.push_str(&format!("{p},{},{},{f}\n", self.depth, self.trials));
        }
        out
    }
}

/// Crossing indicator at every grid point for one seed. Because all grid
/// points share the seed's coins, the result is non-decreasing along an
/// ascending grid.
pub fn crossing_indicators(n: u32, p_grid: &[f64], depth: u32, seed: u64) -> Result<Vec<bool>> {
    let p_max = p_grid.iter().cloned().fold(0.0_f64, f64::max);
    let params = PercolationParams::new(n, p_max, 2, seed, depth)?;
    let coupled = generate_coupled(&params, depth)?;
    p_grid
        .iter()
        .map(|&p| crosses_lr(&coupled.kept_at(p)?, n))
        .collect()
}

fn validate_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.is_empty() {
        return Err(Error::usage("probability grid is empty"));
    }
    if p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::usage("probabilities must lie in [0,1]"));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("probability grid must be strictly ascending"));
    }
    Ok(())
}

/// Crossing frequency at each grid point over `trials` seeds derived from
/// `master_seed`. Trial `t` uses the same seed at every grid point.
pub fn crossing_sweep(n: u32, p_grid: &[f64], depth: u32, trials: u64, master_seed: u64) -> Result<SweepCurve> {
    validate_grid(p_grid)?;
    if trials == 0 {
        return Err(Error::usage("trials must be >= 1"));
    }
    let rows: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| crossing_indicators(n, p_grid, depth, derive_seed(master_seed, t)))
        .collect::<Result<_>>()?;
    let mut hits = vec![0u64; p_grid.len()];
    for row in &rows {
        if row.windows(2).any(|w| w[0] && !w[1]) {
            return Err(Error::construction("crossing indicator decreased along the grid"));
        }
        for (h, &b) in hits.iter_mut().zip(row) {
            *h += u64::from(b);
        }
    }
    Ok(SweepCurve {
        n,
        p_values: p_grid.to_vec(),
        crossing_freq: hits.iter().map(|&h| h as f64 / trials as f64).collect(),
        depth,
        trials,
        master_seed,
    })
}
