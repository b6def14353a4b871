//! Level-1 walk families inside a single `N × N` block.
//!
//! `solve_through` follows the induction on the block size: a forbidden
//! square in the top or bottom row is handled by a staircase in the
//! remaining band of rows; otherwise one walk is routed along the top row
//! (and, when needed, down the right column) and the rest of the family is
//! obtained recursively in the lower-left `(N-1) × (N-1)` block with the
//! targets shifted one column to the left.

use std::collections::BTreeSet;

use super::dihedral::{Dihedral, Pos};
use super::{WalkKind, WalkPath};
use crate::error::{Error, Result};
use crate::percolation::CellIndex;

pub(crate) type LocalWalk = Vec<Pos>;

fn transform_instance(
    g: Dihedral,
    size: u32,
    s: &BTreeSet<u32>,
    t: &BTreeSet<u32>,
    f: Pos,
) -> (BTreeSet<u32>, BTreeSet<u32>, Pos) {
    // Only used with transforms that fix the left and right columns setwise
    // (vertical reflection), so rows map to rows.
    debug_assert!(g == Dihedral::FLIP_Y);
    let map = |r: &u32| size - 1 - r;
    (s.iter().map(map).collect(), t.iter().map(map).collect(), g.apply(f, size))
}

fn untransform(g: Dihedral, size: u32, walks: Vec<LocalWalk>) -> Vec<LocalWalk> {
    walks
        .into_iter()
        .map(|w| w.into_iter().map(|p| g.invert(p, size)).collect())
        .collect()
}

/// `size - 2` pairwise disjoint left-to-right walks in a `size × size`
/// block, starting at rows `s` of column 0, ending at rows `t` of column
/// `size - 1`, avoiding `f`. Requires `|s| = |t| = size - 2` and
/// `f.y ∉ s ∪ t`.
pub(crate) fn solve_through(size: u32, s: &BTreeSet<u32>, t: &BTreeSet<u32>, f: Pos) -> Vec<LocalWalk> {
    debug_assert_eq!(s.len() as u32, size.saturating_sub(2));
    debug_assert_eq!(t.len() as u32, size.saturating_sub(2));
    if size <= 2 {
        return Vec::new();
    }
    let top = size - 1;

    if f.y == top {
        return band_walks(size, s, t);
    }
    if f.y == 0 {
        let (s2, t2, f2) = transform_instance(Dihedral::FLIP_Y, size, s, t, f);
        return untransform(Dihedral::FLIP_Y, size, solve_through(size, &s2, &t2, f2));
    }

    // Both top corners taken: straight walk along the top row.
    if s.contains(&top) && t.contains(&top) {
        let first: LocalWalk = (0..size).map(|x| Pos::new(x, top)).collect();
        let mut s2 = s.clone();
        let mut t2 = t.clone();
        s2.remove(&top);
        t2.remove(&top);
        return corner_recursion(size, first, &s2, &t2, f);
    }
    if s.contains(&0) && t.contains(&0) {
        let (s2, t2, f2) = transform_instance(Dihedral::FLIP_Y, size, s, t, f);
        return untransform(Dihedral::FLIP_Y, size, solve_through(size, &s2, &t2, f2));
    }

    // Remaining configuration: opposite corners. Normalize to top-left start
    // and bottom-right target.
    if !(s.contains(&top) && t.contains(&0)) {
        let (s2, t2, f2) = transform_instance(Dihedral::FLIP_Y, size, s, t, f);
        return untransform(Dihedral::FLIP_Y, size, solve_through(size, &s2, &t2, f2));
    }
    if f.x == top {
        // Half-turn rotation swaps the roles of starts and targets and keeps
        // the opposite-corner configuration.
        let s2: BTreeSet<u32> = t.iter().map(|r| top - r).collect();
        let t2: BTreeSet<u32> = s.iter().map(|r| top - r).collect();
        let f2 = Dihedral::ROTATE_HALF.apply(f, size);
        return solve_through(size, &s2, &t2, f2)
            .into_iter()
            .map(|w| w.into_iter().rev().map(|p| Dihedral::ROTATE_HALF.invert(p, size)).collect())
            .collect();
    }
    let t_max = *t.iter().next_back().expect("size >= 3 leaves a target");
    let mut first: LocalWalk = (0..size).map(|x| Pos::new(x, top)).collect();
    first.extend((t_max..top).rev().map(|y| Pos::new(top, y)));
    let mut s2 = s.clone();
    let mut t2 = t.clone();
    s2.remove(&top);
    t2.remove(&t_max);
    corner_recursion(size, first, &s2, &t2, f)
}

/// Solve the lower-left `(size-1)²` block with targets shifted left by one
/// column, then extend each sub-walk one step to the right.
fn corner_recursion(size: u32, first: LocalWalk, s: &BTreeSet<u32>, t: &BTreeSet<u32>, f: Pos) -> Vec<LocalWalk> {
    let sub = size - 1;
    // A forbidden square outside the block is replaced by one in the same
    // row inside it; the row condition is all the recursion needs.
    let f_sub = if f.x < sub && f.y < sub { f } else { Pos::new(sub - 1, f.y.min(sub - 1)) };
    let mut walks = vec![first];
    for mut w in solve_through(sub, s, t, f_sub) {
        let end = *w.last().expect("nonempty sub-walk");
        w.push(Pos::new(size - 1, end.y));
        walks.push(w);
    }
    walks
}

/// Staircase family in rows `0..size-1` (the top row is left unused).
fn band_walks(size: u32, s: &BTreeSet<u32>, t: &BTreeSet<u32>) -> Vec<LocalWalk> {
    let band = size - 1;
    let missing = |set: &BTreeSet<u32>| (0..band).find(|r| !set.contains(r)).expect("one band row is free");
    // With `a` the free start row, walk k descends one row at column k - a
    // when a <= k, and otherwise ascends at column a - 1 - k.
    let a = missing(s);
    let starts: Vec<u32> = s.iter().copied().collect();
    let ends: Vec<u32> = t.iter().copied().collect();
    starts
        .iter()
        .zip(&ends)
        .enumerate()
        .map(|(k, (&sr, &tr))| {
            let k = k as u32;
            let turn = if sr == tr {
                size - 1
            } else if sr > tr {
                k - a
            } else {
                a - 1 - k
            };
            let mut w: LocalWalk = (0..=turn).map(|x| Pos::new(x, sr)).collect();
            if sr != tr {
                w.extend((turn..size).map(|x| Pos::new(x, tr)));
            }
            w
        })
        .collect()
}

/// `size - 2` disjoint L-shaped walks from rows `s` of column 0 to columns
/// `t` of the top row. Requires `f.y ∉ s` and `f.x ∉ t`.
pub(crate) fn solve_turning(size: u32, s: &BTreeSet<u32>, t: &BTreeSet<u32>) -> Vec<LocalWalk> {
    let top = size.saturating_sub(1);
    s.iter()
        .zip(t.iter().rev())
        .map(|(&row, &col)| {
            let mut w: LocalWalk = (0..=col).map(|x| Pos::new(x, row)).collect();
            w.extend((row + 1..=top).map(|y| Pos::new(col, y)));
            w
        })
        .collect()
}

fn level1_positions(cells: &[CellIndex], n: u32, what: &str) -> Result<Vec<Pos>> {
    cells
        .iter()
        .map(|c| {
            if c.level != 1 || !c.in_range(n) {
                Err(Error::usage(format!("{what}: {c:?} is not a level-1 cell of the {n}x{n} grid")))
            } else {
                Ok(Pos::new(c.x as u32, c.y as u32))
            }
        })
        .collect()
}

fn distinct_count(rows: &BTreeSet<u32>, expected: usize, what: &str) -> Result<()> {
    if rows.len() != expected {
        return Err(Error::usage(format!("{what} must contain {expected} distinct cells")));
    }
    Ok(())
}

fn to_walks(walks: Vec<LocalWalk>, kind: WalkKind) -> Vec<WalkPath> {
    walks
        .into_iter()
        .map(|w| WalkPath::new(1, kind, w.into_iter().map(|p| CellIndex::new2(1, u64::from(p.x), u64::from(p.y))).collect()))
        .collect()
}

/// `N - 2` non-overlapping level-1 walks avoiding `forbidden`, whose first
/// squares are exactly `starts` (left column) and last squares exactly
/// `ends` (right column).
pub fn through_walks(n: u32, starts: &[CellIndex], ends: &[CellIndex], forbidden: CellIndex) -> Result<Vec<WalkPath>> {
    if n < 2 {
        return Err(Error::usage("n must be >= 2"));
    }
    let s = level1_positions(starts, n, "starts")?;
    let t = level1_positions(ends, n, "ends")?;
    let f = level1_positions(&[forbidden], n, "forbidden")?[0];
    if s.iter().any(|p| p.x != 0) {
        return Err(Error::usage("starts must touch the left edge"));
    }
    if t.iter().any(|p| p.x != n - 1) {
        return Err(Error::usage("ends must touch the right edge"));
    }
    let s_rows: BTreeSet<u32> = s.iter().map(|p| p.y).collect();
    let t_rows: BTreeSet<u32> = t.iter().map(|p| p.y).collect();
    distinct_count(&s_rows, starts.len(), "starts")?;
    distinct_count(&t_rows, ends.len(), "ends")?;
    distinct_count(&s_rows, (n - 2) as usize, "starts")?;
    distinct_count(&t_rows, (n - 2) as usize, "ends")?;
    if s_rows.contains(&f.y) || t_rows.contains(&f.y) {
        return Err(Error::usage("the row of the forbidden square meets starts or ends"));
    }
    let walks = to_walks(solve_through(n, &s_rows, &t_rows, f), WalkKind::Through);
    check_family(&walks, n, forbidden)?;
    Ok(walks)
}

/// `N - 2` non-overlapping L-shaped turning walks from `starts` (left
/// column) to `ends` (top row) avoiding `forbidden`.
pub fn turning_walks(n: u32, starts: &[CellIndex], ends: &[CellIndex], forbidden: CellIndex) -> Result<Vec<WalkPath>> {
    if n < 2 {
        return Err(Error::usage("n must be >= 2"));
    }
    let s = level1_positions(starts, n, "starts")?;
    let t = level1_positions(ends, n, "ends")?;
    let f = level1_positions(&[forbidden], n, "forbidden")?[0];
    if s.iter().any(|p| p.x != 0) {
        return Err(Error::usage("starts must touch the left edge"));
    }
    if t.iter().any(|p| p.y != n - 1) {
        return Err(Error::usage("ends must touch the top edge"));
    }
    let s_rows: BTreeSet<u32> = s.iter().map(|p| p.y).collect();
    let t_cols: BTreeSet<u32> = t.iter().map(|p| p.x).collect();
    distinct_count(&s_rows, starts.len(), "starts")?;
    distinct_count(&t_cols, ends.len(), "ends")?;
    distinct_count(&s_rows, (n - 2) as usize, "starts")?;
    distinct_count(&t_cols, (n - 2) as usize, "ends")?;
    if s_rows.contains(&f.y) {
        return Err(Error::usage("the row of the forbidden square meets starts"));
    }
    if t_cols.contains(&f.x) {
        return Err(Error::usage("the column of the forbidden square meets ends"));
    }
    let walks = to_walks(solve_turning(n, &s_rows, &t_cols), WalkKind::Turning);
    check_family(&walks, n, forbidden)?;
    Ok(walks)
}

fn check_family(walks: &[WalkPath], n: u32, forbidden: CellIndex) -> Result<()> {
    for w in walks {
        w.validate(n)?;
        if w.cells.contains(&forbidden) {
            return Err(Error::construction("walk enters the forbidden square"));
        }
    }
    if !super::pairwise_disjoint(walks) {
        return Err(Error::construction("walks overlap"));
    }
    Ok(())
}
