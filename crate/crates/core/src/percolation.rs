//! The random recursive construction `M_0 ⊇ M_1 ⊇ …` in one and two
//! dimensions, driven by the stateless coins of [`crate::coin`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{self, child_key, child_salts, key_mantissa, keep_threshold, mix64, root_key};
use crate::error::{Error, Result};

/// Default cap on the number of candidate cells a single level may hold when
/// a tree is materialized.
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 25;

/// Address of a level-`k` grid cell. For one-dimensional constructions `y`
/// is always 0. Ordering is row-major within a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub level: u32,
    pub y: u64,
    pub x: u64,
}

impl CellIndex {
    pub const ROOT: CellIndex = CellIndex { level: 0, y: 0, x: 0 };

    pub fn new2(level: u32, x: u64, y: u64) -> Self {
        CellIndex { level, y, x }
    }

    pub fn new1(level: u32, x: u64) -> Self {
        CellIndex { level, y: 0, x }
    }

    /// Number of cells along one axis at this level.
    pub fn side_count(n: u32, level: u32) -> u64 {
        u64::from(n).pow(level)
    }

    pub fn in_range(&self, n: u32) -> bool {
        let side = Self::side_count(n, self.level);
        self.x < side && self.y < side
    }

    pub fn parent(&self, n: u32) -> Option<CellIndex> {
        if self.level == 0 {
            return None;
        }
        let n = u64::from(n);
        Some(CellIndex { level: self.level - 1, y: self.y / n, x: self.x / n })
    }

    /// Ancestor at `level` (which must not exceed `self.level`).
    pub fn ancestor(&self, n: u32, level: u32) -> CellIndex {
        debug_assert!(level <= self.level);
        let scale = u64::from(n).pow(self.level - level);
        CellIndex { level, y: self.y / scale, x: self.x / scale }
    }

    /// Children in row-major slot order.
    pub fn children(&self, n: u32, ambient_dim: u8) -> Vec<CellIndex> {
        let n64 = u64::from(n);
        let rows = if ambient_dim == 1 { 1 } else { n64 };
        let mut out = Vec::with_capacity((rows * n64) as usize);
        for dy in 0..rows {
            for dx in 0..n64 {
                out.push(CellIndex {
                    level: self.level + 1,
                    y: if ambient_dim == 1 { 0 } else { self.y * n64 + dy },
                    x: self.x * n64 + dx,
                });
            }
        }
        out
    }

    /// Side length `n^-level`.
    pub fn side(&self, n: u32) -> f64 {
        (f64::from(n)).powi(-(self.level as i32))
    }

    /// Closed square `[x0, x1] × [y0, y1]`.
    pub fn bounds(&self, n: u32) -> [f64; 4] {
        let s = self.side(n);
        [self.x as f64 * s, (self.x + 1) as f64 * s, self.y as f64 * s, (self.y + 1) as f64 * s]
    }
}

/// Parameters of one construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationParams {
    pub n: u32,
    pub p: f64,
    pub ambient_dim: u8,
    pub seed: u64,
    pub max_depth: u32,
    pub cell_budget: u64,
}

impl PercolationParams {
    pub fn new(n: u32, p: f64, ambient_dim: u8, seed: u64, max_depth: u32) -> Result<Self> {
        let params = PercolationParams {
            n,
            p,
            ambient_dim,
            seed,
            max_depth,
            cell_budget: DEFAULT_CELL_BUDGET,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_budget(mut self, cell_budget: u64) -> Self {
        self.cell_budget = cell_budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::usage(format!("n must be >= 2, got {}", self.n)));
        }
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(Error::usage(format!("p must lie in [0,1], got {}", self.p)));
        }
        if self.ambient_dim != 1 && self.ambient_dim != 2 {
            return Err(Error::usage(format!("ambient_dim must be 1 or 2, got {}", self.ambient_dim)));
        }
        // Coordinates along one axis must fit comfortably in a u64.
        match u64::from(self.n).checked_pow(self.max_depth) {
            Some(side) if side < (1u64 << 62) => Ok(()),
            _ => Err(Error::usage(format!(
                "max_depth {} too large for n = {}",
                self.max_depth, self.n
            ))),
        }
    }

    /// Children per cell: `n` in 1D, `n²` in 2D.
    pub fn branching(&self) -> u64 {
        u64::from(self.n).pow(u32::from(self.ambient_dim))
    }
}

/// Read access to "is this cell kept" for materialized and lazy trees.
pub trait CellOracle {
    fn n(&self) -> u32;
    fn ambient_dim(&self) -> u8;
    fn depth(&self) -> u32;
    fn is_kept(&self, cell: &CellIndex) -> bool;
}

/// One materialized level: row-major sorted cells and their coin keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Level {
    cells: Vec<CellIndex>,
    keys: Vec<u64>,
}

impl Level {
    pub fn cells(&self) -> &[CellIndex] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &CellIndex) -> bool {
        self.cells.binary_search(cell).is_ok()
    }
}

/// Nested kept-cell sets for levels `0..=depth`. Immutable after generation.
#[derive(Clone, Debug, PartialEq)]
pub struct PercolationTree {
    params: PercolationParams,
    levels: Vec<Level>,
}

impl PercolationTree {
    pub fn params(&self) -> &PercolationParams {
        &self.params
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn level(&self, k: u32) -> &Level {
        &self.levels[k as usize]
    }

    pub fn kept(&self, k: u32) -> &[CellIndex] {
        self.levels[k as usize].cells()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.len() as u64).collect()
    }

    /// Whether the deepest level is nonempty.
    pub fn survived(&self) -> bool {
        !self.levels.last().map(Level::is_empty).unwrap_or(true)
    }
}

impl CellOracle for PercolationTree {
    fn n(&self) -> u32 {
        self.params.n
    }

    fn ambient_dim(&self) -> u8 {
        self.params.ambient_dim
    }

    fn depth(&self) -> u32 {
        PercolationTree::depth(self)
    }

    fn is_kept(&self, cell: &CellIndex) -> bool {
        cell.level <= self.depth() && self.levels[cell.level as usize].contains(cell)
    }
}

/// Cells at or above this many parents are expanded in parallel.
const PAR_EXPAND_MIN: usize = 4096;

fn expand_parent(
    cell: &CellIndex,
    key: u64,
    n: u64,
    rows: u64,
    threshold: u64,
    out: &mut Vec<(CellIndex, u64)>,
) {
    for dy in 0..rows {
        for dx in 0..n {
            let slot = dy * n + dx;
            let k = child_key(key, slot);
            if key_mantissa(k) < threshold {
                out.push((
                    CellIndex {
                        level: cell.level + 1,
                        y: if rows == 1 { 0 } else { cell.y * n + dy },
                        x: cell.x * n + dx,
                    },
                    k,
                ));
            }
        }
    }
}

/// Materialize levels `0..=depth`. Level `k+1` is exactly the set of
/// children of kept level-`k` cells whose coin is below `p`.
pub fn generate(params: &PercolationParams, depth: u32) -> Result<PercolationTree> {
    params.validate()?;
    if depth > params.max_depth {
        return Err(Error::usage(format!(
            "depth {depth} exceeds max_depth {}",
            params.max_depth
        )));
    }
    let n = u64::from(params.n);
    let rows = if params.ambient_dim == 1 { 1 } else { n };
    let branching = params.branching();
    let threshold = keep_threshold(params.p);

    let mut levels = Vec::with_capacity(depth as usize + 1);
    levels.push(Level {
        cells: vec![CellIndex::ROOT],
        keys: vec![root_key(params.seed, params.ambient_dim)],
    });

    for level in 1..=depth {
        let prev = levels.last().expect("root level present");
        let needed = (prev.len() as u64).saturating_mul(branching);
        if needed > params.cell_budget {
            return Err(Error::Resource { level, needed, budget: params.cell_budget });
        }
        let mut pairs: Vec<(CellIndex, u64)> = if prev.len() >= PAR_EXPAND_MIN {
            prev.cells
                .par_iter()
                .zip(prev.keys.par_iter())
                .fold(Vec::new, |mut acc, (c, &k)| {
                    expand_parent(c, k, n, rows, threshold, &mut acc);
                    acc
                })
                .reduce(Vec::new, |mut a, mut b| {
                    a.append(&mut b);
                    a
                })
        } else {
            let mut acc = Vec::new();
            for (c, &k) in prev.cells.iter().zip(&prev.keys) {
                expand_parent(c, k, n, rows, threshold, &mut acc);
            }
            acc
        };
        pairs.par_sort_unstable_by_key(|(c, _)| *c);
        let (cells, keys) = pairs.into_iter().unzip();
        levels.push(Level { cells, keys });
    }

    Ok(PercolationTree { params: *params, levels })
}

/// The one-dimensional analogue (intervals instead of squares).
pub fn generate_1d(params: &PercolationParams, depth: u32) -> Result<PercolationTree> {
    let mut p1 = *params;
    p1.ambient_dim = 1;
    generate(&p1, depth)
}

/// True iff `low ⊆ high` at every common level. Both trees must come from
/// the same seed, subdivision factor and dimension.
pub fn tree_inclusion(low: &PercolationTree, high: &PercolationTree) -> Result<bool> {
    let (a, b) = (low.params(), high.params());
    if a.seed != b.seed || a.n != b.n || a.ambient_dim != b.ambient_dim {
        return Err(Error::usage("inclusion check needs identical seed, n and ambient_dim"));
    }
    let depth = low.depth().min(high.depth());
    Ok((0..=depth).all(|k| low.kept(k).iter().all(|c| high.level(k).contains(c))))
}

/// Generate the trees at `p_low` and `p_high` from the shared seed and check
/// `kept(p_low) ⊆ kept(p_high)` at every level.
pub fn coupled_inclusion(
    params: &PercolationParams,
    p_low: f64,
    p_high: f64,
    depth: u32,
) -> Result<bool> {
    if p_low > p_high {
        return Err(Error::usage(format!("p_low {p_low} exceeds p_high {p_high}")));
    }
    let low = generate(&params.with_p(p_low), depth)?;
    let high = generate(&params.with_p(p_high), depth)?;
    tree_inclusion(&low, &high)
}

/// The deepest level of a tree generated at `p_max`, with every cell tagged by
/// the largest coin mantissa along its ancestry. Filtering by that tag yields
/// the level of the tree with the same seed at any `p <= p_max`.
#[derive(Clone, Debug)]
pub struct CoupledLevel {
    pub params: PercolationParams,
    pub level: u32,
    cells: Vec<CellIndex>,
    max_mantissa: Vec<u64>,
}

impl CoupledLevel {
    /// Kept cells at level `self.level` for retention probability `p`,
    /// row-major sorted. Requires `p <= params.p`.
    pub fn kept_at(&self, p: f64) -> Result<Vec<CellIndex>> {
        if p > self.params.p {
            return Err(Error::usage(format!(
                "coupled level was generated at p = {}, cannot query p = {p}",
                self.params.p
            )));
        }
        let t = keep_threshold(p);
        Ok(self
            .cells
            .iter()
            .zip(&self.max_mantissa)
            .filter(|(_, &m)| m < t)
            .map(|(c, _)| *c)
            .collect())
    }
}

pub fn generate_coupled(params: &PercolationParams, depth: u32) -> Result<CoupledLevel> {
    params.validate()?;
    let n = u64::from(params.n);
    let rows = if params.ambient_dim == 1 { 1 } else { n };
    let threshold = keep_threshold(params.p);
    // (cell, key, running max mantissa)
    let mut cur = vec![(CellIndex::ROOT, root_key(params.seed, params.ambient_dim), 0u64)];
    for level in 1..=depth {
        let needed = (cur.len() as u64).saturating_mul(params.branching());
        if needed > params.cell_budget {
            return Err(Error::Resource { level, needed, budget: params.cell_budget });
        }
        let mut next = Vec::new();
        for &(c, key, m) in &cur {
            for dy in 0..rows {
                for dx in 0..n {
                    let k = child_key(key, dy * n + dx);
                    let mm = key_mantissa(k);
                    if mm < threshold {
                        let child = CellIndex {
                            level,
                            y: if rows == 1 { 0 } else { c.y * n + dy },
                            x: c.x * n + dx,
                        };
                        next.push((child, k, m.max(mm)));
                    }
                }
            }
        }
        cur = next;
    }
    cur.sort_unstable_by_key(|(c, _, _)| *c);
    Ok(CoupledLevel {
        params: *params,
        level: depth,
        cells: cur.iter().map(|t| t.0).collect(),
        max_mantissa: cur.iter().map(|t| t.2).collect(),
    })
}

/// Unmaterialized tree: membership is recomputed from the coins on demand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LazyTree {
    pub params: PercolationParams,
    pub depth: u32,
}

impl LazyTree {
    pub fn new(params: PercolationParams, depth: u32) -> Result<Self> {
        params.validate()?;
        if depth > params.max_depth {
            return Err(Error::usage(format!(
                "depth {depth} exceeds max_depth {}",
                params.max_depth
            )));
        }
        Ok(LazyTree { params, depth })
    }
}

impl CellOracle for LazyTree {
    fn n(&self) -> u32 {
        self.params.n
    }

    fn ambient_dim(&self) -> u8 {
        self.params.ambient_dim
    }

    fn depth(&self) -> u32 {
        self.depth
    }

    fn is_kept(&self, cell: &CellIndex) -> bool {
        if cell.level > self.depth || !cell.in_range(self.params.n) {
            return false;
        }
        if self.params.ambient_dim == 1 && cell.y != 0 {
            return false;
        }
        let threshold = keep_threshold(self.params.p);
        let n = u64::from(self.params.n);
        let mut key = root_key(self.params.seed, self.params.ambient_dim);
        for l in 1..=cell.level {
            let scale = n.pow(cell.level - l);
            let slot = ((cell.y / scale) % n) * n + (cell.x / scale) % n;
            key = child_key(key, slot);
            if key_mantissa(key) >= threshold {
                return false;
            }
        }
        true
    }
}

fn count_subtree(key: u64, level: u32, depth: u32, salts: &[u64], threshold: u64, counts: &mut [u64]) {
    let kept = |k: u64| key_mantissa(k) < threshold;
    if level + 1 == depth {
        counts[depth as usize] += salts.iter().map(|&s| u64::from(kept(mix64(key ^ s)))).sum::<u64>();
        return;
    }
    if level + 2 == depth {
        // Last two levels unrolled; this is where almost all coins are drawn.
        for &s in salts {
            let k = mix64(key ^ s);
            if kept(k) {
                counts[level as usize + 1] += 1;
                counts[depth as usize] += salts.iter().map(|&t| u64::from(kept(mix64(k ^ t)))).sum::<u64>();
            }
        }
        return;
    }
    for &s in salts {
        let k = mix64(key ^ s);
        if kept(k) {
            counts[level as usize + 1] += 1;
            count_subtree(k, level + 1, depth, salts, threshold, counts);
        }
    }
}

/// Kept counts for levels `0..=depth` without materializing any level. The
/// result equals `generate(params, depth)?.counts()` but needs only
/// `O(depth)` memory, so it reaches depths whose levels would never fit in
/// memory.
pub fn level_counts(params: &PercolationParams, depth: u32) -> Result<Vec<u64>> {
    params.validate()?;
    let branching = params.branching();
    let threshold = keep_threshold(params.p);
    let mut counts = vec![0u64; depth as usize + 1];
    counts[0] = 1;
    if depth == 0 {
        return Ok(counts);
    }
    // Split at level 1 and reduce in slot order.
    let root = root_key(params.seed, params.ambient_dim);
    let firsts: Vec<u64> = (0..branching)
        .map(|s| child_key(root, s))
        .filter(|&k| key_mantissa(k) < threshold)
        .collect();
    counts[1] = firsts.len() as u64;
    if depth == 1 {
        return Ok(counts);
    }
    let salts = child_salts(branching);
    let partials: Vec<Vec<u64>> = firsts
        .par_iter()
        .map(|&k| {
            let mut local = vec![0u64; depth as usize + 1];
            count_subtree(k, 1, depth, &salts, threshold, &mut local);
            local
        })
        .collect();
    for part in partials {
        for (c, v) in counts.iter_mut().zip(part) {
            *c += v;
        }
    }
    Ok(counts)
}

fn survives_below(key: u64, level: u32, depth: u32, branching: u64, threshold: u64) -> bool {
    if level == depth {
        return true;
    }
    (0..branching).any(|slot| {
        let k = child_key(key, slot);
        key_mantissa(k) < threshold && survives_below(k, level + 1, depth, branching, threshold)
    })
}

/// Whether level `depth` is nonempty, found by a depth-first search that
/// stops at the first surviving line of descent.
pub fn survives_to(params: &PercolationParams, depth: u32) -> Result<bool> {
    params.validate()?;
    let root = root_key(params.seed, params.ambient_dim);
    Ok(survives_below(root, 0, depth, params.branching(), keep_threshold(params.p)))
}

/// Derives seeds from `master` until `needed`
/// constructions have a nonempty level `depth`, testing survival with `alive`.
/// Returns the surviving seeds and the number of rejected seeds.
pub fn surviving_seeds<F>(master: u64, needed: usize, max_attempts: u64, alive: F) -> Result<(Vec<u64>, u64)>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    let mut seeds = Vec::with_capacity(needed);
    let mut rejected = 0u64;
    let mut next = 0u64;
    // Evaluate in deterministic batches so the accepted set does not depend
    // on scheduling.
    while seeds.len() < needed {
        if next >= max_attempts {
            return Err(Error::construction(format!(
                "only {} of {needed} surviving constructions after {max_attempts} attempts",
                seeds.len()
            )));
        }
        let batch_end = (next + (needed - seeds.len()) as u64 + 8).min(max_attempts);
        let verdicts: Vec<Result<(u64, bool)>> = (next..batch_end)
            .into_par_iter()
            .map(|i| {
                let s = coin::derive_seed(master, i);
                alive(s).map(|a| (s, a))
            })
            .collect();
        for v in verdicts {
            let (s, a) = v?;
            if seeds.len() == needed {
                break;
            }
            if a {
                seeds.push(s);
            } else {
                rejected += 1;
            }
        }
        next = batch_end;
    }
    Ok((seeds, rejected))
}
