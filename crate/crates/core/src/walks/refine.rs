//! Refinement of a level-k walk into `N - 2` level-(k+1) sub-walks avoiding
//! a forbidden family with at most one member per square.

use std::collections::{BTreeSet, HashMap};

use super::dihedral::{Dihedral, Pos, Side};
use super::solver::{solve_through, solve_turning, LocalWalk};
use super::{pairwise_disjoint, WalkKind, WalkPath};
use crate::error::{Error, Result};
use crate::percolation::CellIndex;

fn side_towards(from: &CellIndex, to: &CellIndex) -> Side {
    if to.x > from.x {
        Side::Right
    } else if to.x < from.x {
        Side::Left
    } else if to.y > from.y {
        Side::Top
    } else {
        Side::Bottom
    }
}

/// `N - 2` positions along an edge, skipping the listed ones and, when only
/// one was skipped, also the lowest remaining position.
fn interface(n: u32, skip: &[u32]) -> Vec<u32> {
    let mut free: Vec<u32> = (0..n).filter(|a| !skip.contains(a)).collect();
    while free.len() > n as usize - 2 {
        free.remove(0);
    }
    free
}

/// Walks from `entry` positions to `exit` positions inside one square, in
/// the square's own local frame.
fn solve_square(n: u32, entry: Side, exit: Side, starts: &[u32], ends: &[u32], f: Pos) -> Result<Vec<LocalWalk>> {
    let target = if exit == entry.opposite() { Side::Right } else { Side::Top };
    let g = Dihedral::mapping(entry, exit, Side::Left, target)
        .ok_or_else(|| Error::construction("no symmetry maps the square to a canonical instance"))?;
    let f_canon = g.apply(f, n);
    let start_set: BTreeSet<u32> = starts.iter().map(|&a| Side::Left.along(g.apply(entry.cell_at(a, n), n))).collect();
    let end_set: BTreeSet<u32> = ends.iter().map(|&a| target.along(g.apply(exit.cell_at(a, n), n))).collect();
    let walks = if target == Side::Right {
        if start_set.contains(&f_canon.y) || end_set.contains(&f_canon.y) {
            return Err(Error::construction("interface meets the row of the forbidden square"));
        }
        solve_through(n, &start_set, &end_set, f_canon)
    } else {
        if start_set.contains(&f_canon.y) || end_set.contains(&f_canon.x) {
            return Err(Error::construction("interface meets the line of the forbidden square"));
        }
        solve_turning(n, &start_set, &end_set)
    };
    Ok(walks
        .into_iter()
        .map(|w| w.into_iter().map(|p| g.invert(p, n)).collect())
        .collect())
}

/// `N - 2` pairwise disjoint level-(k+1) walks inside the squares of `walk`
/// avoiding every cell of `forbidden`. Forbidden cells outside the walk are
/// ignored. Sub-walks are ordered by the row of their first square.
pub fn refine_walk(walk: &WalkPath, forbidden: &[CellIndex], n: u32) -> Result<Vec<WalkPath>> {
    if n < 2 {
        return Err(Error::usage("n must be >= 2"));
    }
    walk.validate(n).map_err(|e| Error::usage(format!("input walk: {e}")))?;
    let child_level = walk.level + 1;
    let n64 = u64::from(n);

    let position: HashMap<CellIndex, usize> = walk.cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut local_f: Vec<Option<Pos>> = vec![None; walk.cells.len()];
    for f in forbidden {
        if f.level != child_level {
            return Err(Error::usage(format!("forbidden cell {f:?} is not of level {child_level}")));
        }
        let Some(&r) = position.get(&f.parent(n).expect("level >= 1")) else {
            continue;
        };
        let local = Pos::new((f.x % n64) as u32, (f.y % n64) as u32);
        match local_f[r] {
            Some(prev) if prev != local => {
                return Err(Error::usage(format!(
                    "walk square {:?} contains more than one forbidden cell",
                    walk.cells[r]
                )))
            }
            _ => local_f[r] = Some(local),
        }
    }
    if n == 2 {
        return Ok(Vec::new());
    }
    // Squares without a forbidden cell get a dummy one in their corner.
    let f_star: Vec<Pos> = local_f.iter().map(|f| f.unwrap_or(Pos::new(0, 0))).collect();

    let len = walk.cells.len();
    let final_side = match walk.kind {
        WalkKind::Through => Side::Right,
        WalkKind::Turning => Side::Top,
    };
    let entries: Vec<Side> = (0..len)
        .map(|r| if r == 0 { Side::Left } else { side_towards(&walk.cells[r], &walk.cells[r - 1]) })
        .collect();
    let exits: Vec<Side> = (0..len)
        .map(|r| if r + 1 == len { final_side } else { side_towards(&walk.cells[r], &walk.cells[r + 1]) })
        .collect();

    // Interface positions: edge 0 is the left edge of the first square, edge
    // r (0 < r < len) is shared by squares r-1 and r, edge len is the exit of
    // the last square.
    let edge_positions: Vec<Vec<u32>> = (0..=len)
        .map(|e| {
            let mut skip = Vec::with_capacity(2);
            if e > 0 {
                skip.push(exits[e - 1].along(f_star[e - 1]));
            }
            if e < len {
                skip.push(entries[e].along(f_star[e]));
            }
            interface(n, &skip)
        })
        .collect();

    let mut pieces: Vec<Vec<LocalWalk>> = Vec::with_capacity(len);
    for r in 0..len {
        pieces.push(solve_square(n, entries[r], exits[r], &edge_positions[r], &edge_positions[r + 1], f_star[r])?);
    }

    let to_global = |r: usize, p: Pos| {
        let s = &walk.cells[r];
        CellIndex::new2(child_level, s.x * n64 + u64::from(p.x), s.y * n64 + u64::from(p.y))
    };
    // Index each square's pieces by their first cell so threads can be
    // continued across shared edges.
    let by_start: Vec<HashMap<CellIndex, usize>> = (0..len)
        .map(|r| pieces[r].iter().enumerate().map(|(i, w)| (to_global(r, w[0]), i)).collect())
        .collect();

    let mut threads = Vec::with_capacity(pieces[0].len());
    for first in &pieces[0] {
        let mut cells: Vec<CellIndex> = first.iter().map(|&p| to_global(0, p)).collect();
        for r in 1..len {
            let end = *cells.last().expect("nonempty piece");
            let next = step(&end, exits[r - 1]);
            let &i = by_start[r]
                .get(&next)
                .ok_or_else(|| Error::construction(format!("no sub-walk continues from {end:?} into square {r}")))?;
            cells.extend(pieces[r][i].iter().map(|&p| to_global(r, p)));
        }
        threads.push(WalkPath::new(child_level, walk.kind, cells));
    }
    threads.sort_by_key(|w| w.first().y);

    for w in &threads {
        w.validate(n)?;
        if w.cells.iter().any(|c| forbidden.contains(c)) {
            return Err(Error::construction("sub-walk enters a forbidden cell"));
        }
        if w.cells.iter().any(|c| !position.contains_key(&c.parent(n).expect("level >= 1"))) {
            return Err(Error::construction("sub-walk leaves the parent walk"));
        }
    }
    if threads.len() != n as usize - 2 || !pairwise_disjoint(&threads) {
        return Err(Error::construction("sub-walks are not N-2 disjoint walks"));
    }
    Ok(threads)
}

fn step(c: &CellIndex, side: Side) -> CellIndex {
    match side {
        Side::Left => CellIndex::new2(c.level, c.x - 1, c.y),
        Side::Right => CellIndex::new2(c.level, c.x + 1, c.y),
        Side::Bottom => CellIndex::new2(c.level, c.x, c.y - 1),
        Side::Top => CellIndex::new2(c.level, c.x, c.y + 1),
    }
}
