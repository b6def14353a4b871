//! Independent oracles shared by the integration tests. None of them call
//! into the code under test except for the coin function and the tree's
//! membership query.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use fracperc::arc::{BasicSegment, Orientation};
use fracperc::coin::cell_coin;
use fracperc::gridset::GridSet;
use fracperc::{CellIndex, CellOracle};

pub mod walkcheck;

/// Per-level kept counts from a plain recursion over the coin function.
pub fn reference_counts(seed: u64, n: u32, p: f64, dim: u8, depth: u32) -> Vec<u64> {
    fn visit(seed: u64, n: u32, p: f64, dim: u8, depth: u32, cell: CellIndex, counts: &mut [u64]) {
        counts[cell.level as usize] += 1;
        if cell.level == depth {
            return;
        }
        let rows = if dim == 1 { 1 } else { u64::from(n) };
        for dy in 0..rows {
            for dx in 0..u64::from(n) {
                let child = CellIndex {
                    level: cell.level + 1,
                    x: cell.x * u64::from(n) + dx,
                    y: if dim == 1 { 0 } else { cell.y * u64::from(n) + dy },
                };
                if cell_coin(seed, dim, n, &child) < p {
                    visit(seed, n, p, dim, depth, child, counts);
                }
            }
        }
    }
    let mut counts = vec![0; depth as usize + 1];
    visit(seed, n, p, dim, depth, CellIndex::ROOT, &mut counts);
    counts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Right,
    Top,
}

/// Walk conditions checked from scratch on `(x, y)` pairs.
pub fn check_walk(cells: &[(u64, u64)], side: u64, end: End) -> Result<(), String> {
    let Some(&first) = cells.first() else {
        return Err("empty".into());
    };
    let mut seen = HashSet::new();
    for &(x, y) in cells {
        if x >= side || y >= side {
            return Err(format!("({x},{y}) out of range"));
        }
        if !seen.insert((x, y)) {
            return Err(format!("({x},{y}) repeated"));
        }
    }
    for w in cells.windows(2) {
        let ((a, b), (c, d)) = (w[0], w[1]);
        let dist = a.abs_diff(c) + b.abs_diff(d);
        if dist != 1 {
            return Err(format!("({a},{b}) and ({c},{d}) do not share a side"));
        }
    }
    if first.0 != 0 {
        return Err("does not start on the left edge".into());
    }
    let last = *cells.last().unwrap();
    match end {
        End::Right if last.0 != side - 1 => Err("does not end on the right edge".into()),
        End::Top if last.1 != side - 1 => Err("does not end on the top edge".into()),
        _ => Ok(()),
    }
}

pub fn xy(cells: &[CellIndex]) -> Vec<(u64, u64)> {
    cells.iter().map(|c| (c.x, c.y)).collect()
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: u64, k: usize) -> Vec<Vec<u64>> {
    fn go(start: u64, n: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Depth-first search for a simple path from any of `starts` to a cell
/// satisfying `goal`, avoiding `blocked`.
pub fn path_exists(side: u64, blocked: &HashSet<(u64, u64)>, starts: &[(u64, u64)], goal: impl Fn((u64, u64)) -> bool) -> bool {
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut stack: Vec<(u64, u64)> = starts.iter().copied().filter(|c| !blocked.contains(c)).collect();
    while let Some(c) = stack.pop() {
        if !seen.insert(c) {
            continue;
        }
        if goal(c) {
            return true;
        }
        let (x, y) = c;
        let mut next = vec![(x + 1, y), (x, y + 1)];
        if x > 0 {
            next.push((x - 1, y));
        }
        if y > 0 {
            next.push((x, y - 1));
        }
        for d in next {
            if d.0 < side && d.1 < side && !blocked.contains(&d) && !seen.contains(&d) {
                stack.push(d);
            }
        }
    }
    false
}

#[derive(Debug, PartialEq, Eq)]
pub struct Labels {
    pub count: usize,
    pub largest: usize,
    pub lr: bool,
    pub tb: bool,
}

/// Breadth-first labelling of side-adjacent components.
pub fn bfs_components(cells: &[(u64, u64)], side: u64) -> Labels {
    let set: HashSet<(u64, u64)> = cells.iter().copied().collect();
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    let mut labels = Labels { count: 0, largest: 0, lr: false, tb: false };
    for &start in cells {
        if seen.contains(&start) {
            continue;
        }
        labels.count += 1;
        let (mut size, mut l, mut r, mut b, mut t) = (0, false, false, false, false);
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some((x, y)) = queue.pop_front() {
            size += 1;
            l |= x == 0;
            r |= x == side - 1;
            b |= y == 0;
            t |= y == side - 1;
            let mut nb = vec![(x + 1, y), (x, y + 1)];
            if x > 0 {
                nb.push((x - 1, y));
            }
            if y > 0 {
                nb.push((x, y - 1));
            }
            for d in nb {
                if set.contains(&d) && seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
        labels.largest = labels.largest.max(size);
        labels.lr |= l && r;
        labels.tb |= b && t;
    }
    labels
}

/// Cells of level `level` whose closed square contains `(x, y)`.
pub fn closed_cells_at(x: f64, y: f64, n: u32, level: u32) -> Vec<CellIndex> {
    let side = CellIndex::side_count(n, level);
    let axis = |t: f64| -> Vec<u64> {
        let u = t * side as f64;
        let f = u.floor();
        let mut v = Vec::new();
        if f >= 0.0 && (f as u64) < side {
            v.push(f as u64);
        }
        if (u - f).abs() < 1e-9 && f >= 1.0 {
            v.push(f as u64 - 1);
        }
        if (u - f - 1.0).abs() < 1e-9 && ((f + 1.0) as u64) < side {
            v.push(f as u64 + 1);
        }
        v
    };
    let mut out = Vec::new();
    for cx in axis(x) {
        for cy in axis(y) {
            out.push(CellIndex::new2(level, cx, cy));
        }
    }
    out
}

/// First sampled arc point lying in a kept cell of the deepest level
/// without being on a subsegment of `B_levels` or at a subsegment endpoint.
/// Each polyline edge is sampled at `samples + 1` evenly spaced points.
pub fn arc_containment_violation(
    tree: &dyn CellOracle,
    seg: &BasicSegment,
    levels: u32,
    polyline: &[(f64, f64)],
    bad: &GridSet,
    samples: u32,
) -> Option<(f64, f64)> {
    let n = tree.n();
    let deepest = seg.level + levels;
    let fine = CellIndex::side_count(n, deepest) as f64;
    let coarse = CellIndex::side_count(n, seg.level) as f64;
    let line = seg.j as f64 / coarse;
    let start = (seg.i - 1) as f64 / coarse;
    let local = CellIndex::side_count(n, levels) as f64;
    let split = |(x, y): (f64, f64)| match seg.orientation {
        Orientation::Horizontal => (x, y),
        Orientation::Vertical => (y, x),
    };
    let allowed = |p: (f64, f64)| {
        let (along, across) = split(p);
        if (across - line).abs() > 1e-12 {
            return false;
        }
        let u = along * fine;
        if (u - u.round()).abs() < 1e-9 {
            return true;
        }
        let t = ((along - start) * coarse * local).floor() as u64;
        bad.contains(&CellIndex::new1(levels, t))
    };
    for w in polyline.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        for s in 0..=samples {
            let f = f64::from(s) / f64::from(samples);
            let p = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let hit = closed_cells_at(p.0, p.1, n, deepest).iter().any(|c| tree.is_kept(c));
            if hit && !allowed(p) {
                return Some(p);
            }
        }
    }
    None
}
