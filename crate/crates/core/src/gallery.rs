//! Deterministic reference fractals digitized as [`GridSet`]s.
//!
//! Occupied cells are the cells kept by the construction itself at the
//! requested depth, so the carpet at depth k has exactly `8^k` cells.

use serde::{Deserialize, Serialize};

use crate::coin::{derive_seed, mix64};
use crate::error::{Error, Result};
use crate::gridset::GridSet;
use crate::percolation::CellIndex;

fn digits_avoid(mut x: u64, mut y: u64, base: u64, both: u64) -> bool {
    while x > 0 || y > 0 {
        if x % base == both && y % base == both {
            return false;
        }
        x /= base;
        y /= base;
    }
    true
}

/// Level-`depth` cells obtained by replacing every cell with the listed
/// children, given as `(dx, dy)` offsets on the base-`n` grid.
fn substitute(n: u32, depth: u32, children: &[(u64, u64)]) -> Vec<CellIndex> {
    let n64 = u64::from(n);
    let mut cells = vec![CellIndex::ROOT];
    for _ in 0..depth {
        cells = cells
            .iter()
            .flat_map(|c| children.iter().map(move |&(dx, dy)| CellIndex::new2(c.level + 1, c.x * n64 + dx, c.y * n64 + dy)))
            .collect();
    }
    cells
}

/// Sierpiński carpet: base 3, the centre sub-square is erased.
pub fn carpet(depth: u32) -> GridSet {
    let children: Vec<(u64, u64)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).filter(|&(x, y)| (x, y) != (1, 1)).collect();
    let set = GridSet::from_cells(3, depth, 2, substitute(3, depth, &children));
    debug_assert!(set.cells().iter().all(|c| digits_avoid(c.x, c.y, 3, 1)));
    set
}

/// Sierpiński triangle on base 2: the upper-right quarter is erased.
pub fn triangle(depth: u32) -> GridSet {
    GridSet::from_cells(2, depth, 2, substitute(2, depth, &[(0, 0), (1, 0), (0, 1)]))
}

/// von Koch curve from `(0,0)` to `(1,0)` with its rasterization.
#[derive(Clone, Debug, PartialEq)]
pub struct KochCurve {
    pub depth: u32,
    pub polyline: Vec<(f64, f64)>,
    pub raster: GridSet,
}

impl KochCurve {
    pub fn segment_count(&self) -> usize {
        self.polyline.len() - 1
    }
}

/// Sample points per cell width when rasterizing segments.
pub const KOCH_SUPERSAMPLE: u32 = 4;

pub fn koch(depth: u32) -> KochCurve {
    let mut pts = vec![(0.0_f64, 0.0_f64), (1.0, 0.0)];
    let (s, c) = (std::f64::consts::FRAC_PI_3.sin(), std::f64::consts::FRAC_PI_3.cos());
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * pts.len());
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = ((b.0 - a.0) / 3.0, (b.1 - a.1) / 3.0);
            let p1 = (a.0 + d.0, a.1 + d.1);
            let p3 = (a.0 + 2.0 * d.0, a.1 + 2.0 * d.1);
            let p2 = (p1.0 + d.0 * c - d.1 * s, p1.1 + d.0 * s + d.1 * c);
            next.extend([a, p1, p2, p3]);
        }
        next.push(*pts.last().expect("nonempty"));
        pts = next;
    }
    let side = CellIndex::side_count(3, depth);
    let sf = side as f64;
    let cell_of = |t: f64| ((t * sf).floor().max(0.0) as u64).min(side - 1);
    let mut cells = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = ((b.0 - a.0).hypot(b.1 - a.1) * sf).max(1.0);
        let samples = (len * f64::from(KOCH_SUPERSAMPLE)).ceil() as u32;
        for i in 0..=samples {
            let t = f64::from(i) / f64::from(samples);
            let (x, y) = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            cells.push(CellIndex::new2(depth, cell_of(x), cell_of(y)));
        }
    }
    KochCurve { depth, polyline: pts, raster: GridSet::from_cells(3, depth, 2, cells) }
}

/// Which `L` of the `N` children of each interval are kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// The first `L` children.
    First,
    /// The same fixed child positions everywhere.
    Children(Vec<u32>),
    /// An independent seeded choice of `L` children per interval.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularSetSpec {
    pub l: u32,
    pub n: u32,
    pub depth: u32,
    pub selection: Selection,
}

impl RegularSetSpec {
    /// The middle-thirds Cantor set.
    pub fn cantor(depth: u32) -> Self {
        RegularSetSpec { l: 2, n: 3, depth, selection: Selection::Children(vec![0, 2]) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::usage(format!("N must be >= 2, got {}", self.n)));
        }
        if self.l > self.n {
            return Err(Error::usage(format!("L = {} exceeds N = {}", self.l, self.n)));
        }
        if u64::from(self.n).checked_pow(self.depth).is_none() {
            return Err(Error::usage("depth too large for the grid"));
        }
        if let Selection::Children(list) = &self.selection {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != list.len() || list.len() != self.l as usize || list.iter().any(|&c| c >= self.n) {
                return Err(Error::usage(format!("child list must name exactly {} distinct children below {}", self.l, self.n)));
            }
        }
        Ok(())
    }
}

/// `L` of `N` children chosen by a partial Fisher–Yates shuffle driven by a
/// hash of `(seed, cell)`.
fn seeded_children(seed: u64, cell: &CellIndex, l: u32, n: u32) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..n).collect();
    let mut state = mix64(derive_seed(seed, cell.level as u64) ^ mix64(cell.x));
    for i in 0..l as usize {
        state = mix64(state.wrapping_add(i as u64));
        let j = i + (state % (n as u64 - i as u64)) as usize;
        idx.swap(i, j);
    }
    let mut out = idx[..l as usize].to_vec();
    out.sort_unstable();
    out
}

/// (L,N)-regular set on `[0,1]`: every kept interval keeps `L` of its `N`
/// children.
pub fn regular_set(spec: &RegularSetSpec) -> Result<GridSet> {
    spec.validate()?;
    let n64 = u64::from(spec.n);
    let mut cells = vec![CellIndex::ROOT];
    for _ in 0..spec.depth {
        cells = cells
            .iter()
            .flat_map(|c| {
                let picks = match &spec.selection {
                    Selection::First => (0..spec.l).collect(),
                    Selection::Children(list) => list.clone(),
                    Selection::Seeded(seed) => seeded_children(*seed, c, spec.l, spec.n),
                };
                picks.into_iter().map(move |d| CellIndex::new1(c.level + 1, c.x * n64 + u64::from(d)))
            })
            .collect();
    }
    Ok(GridSet::from_cells(spec.n, spec.depth, 1, cells))
}

/// `X × [0,1]` for a one-dimensional `X`.
pub fn product_with_interval(base: &GridSet) -> Result<GridSet> {
    if base.dim != 1 {
        return Err(Error::usage("product_with_interval needs a one-dimensional base"));
    }
    let side = base.side_count();
    if side.checked_mul(base.len() as u64).is_none() {
        return Err(Error::usage("product grid too large"));
    }
    let level = base.level;
    let cells = base.cells().iter().flat_map(|c| (0..side).map(move |y| CellIndex::new2(level, c.x, y)));
    Ok(GridSet::from_cells(base.n, level, 2, cells))
}

/// `y = z_i = (2i - 1) / (2·3^line_level)`, the centre of row `i - 1` at
/// level `line_level`.
pub fn section_height(line_level: u32, i: u64) -> Result<f64> {
    let rows = CellIndex::side_count(3, line_level);
    if i < 1 || i > rows {
        return Err(Error::usage(format!("index {i} outside 1..={rows}")));
    }
    Ok((2 * i - 1) as f64 / (2 * rows) as f64)
}

/// Intersection of the horizontal line `y = z_i` with the level-`depth`
/// carpet, as a one-dimensional set on the base-3 grid.
pub fn carpet_section(line_level: u32, i: u64, depth: u32) -> Result<GridSet> {
    section_height(line_level, i)?;
    let side = CellIndex::side_count(3, depth);
    // The line passes through the interior of exactly one row at every depth:
    // in base 3 its height is (i-1)/3^L followed by the digits 111….
    let row = if depth <= line_level {
        (i - 1) / CellIndex::side_count(3, line_level - depth)
    } else {
        let tail = (CellIndex::side_count(3, depth - line_level) - 1) / 2;
        (i - 1) * CellIndex::side_count(3, depth - line_level) + tail
    };
    let cells = (0..side).filter(|&x| digits_avoid(x, row, 3, 1)).map(|x| CellIndex::new1(depth, x));
    Ok(GridSet::from_cells(3, depth, 1, cells))
}

/// Cells of a two-dimensional set met by the line `y = height`, as a
/// one-dimensional set. A line on a grid line meets the rows on both sides.
pub fn horizontal_section(set: &GridSet, height: f64) -> Result<GridSet> {
    if set.dim != 2 {
        return Err(Error::usage("sections need a two-dimensional set"));
    }
    if !(0.0..=1.0).contains(&height) {
        return Err(Error::usage(format!("height {height} outside [0,1]")));
    }
    let side = set.side_count();
    let u = height * side as f64;
    let mut rows = vec![(u.floor() as u64).min(side - 1)];
    if u == u.floor() && u >= 1.0 && (u as u64) < side {
        rows.push(u as u64 - 1);
    }
    let cells = set.cells().iter().filter(|c| rows.contains(&c.y)).map(|c| CellIndex::new1(set.level, c.x));
    Ok(GridSet::from_cells(set.n, set.level, 1, cells))
}
