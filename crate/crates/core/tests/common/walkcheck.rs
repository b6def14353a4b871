//! Walk generators and validators shared by the walk tests and the
//! acceptance suite. Validators return the first violation found.

use std::collections::HashSet;

use fracperc::connectivity::crosses_lr;
use fracperc::walks::{WalkHierarchy, WalkKind, WalkPath};
use fracperc::{CellIndex, CellOracle};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{check_walk, subsets, xy, End};

/// Starts, ends and forbidden cell of one solver instance.
pub type Instance = (Vec<u64>, Vec<u64>, (u64, u64));

/// Every admissible through instance: `N-2` start rows, `N-2` end rows and
/// a forbidden cell in a row missed by both.
pub fn through_instances(n: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for s in subsets(n, n as usize - 2) {
        for t in subsets(n, n as usize - 2) {
            for y in (0..n).filter(|y| !s.contains(y) && !t.contains(y)) {
                for x in 0..n {
                    out.push((s.clone(), t.clone(), (x, y)));
                }
            }
        }
    }
    out
}

/// Every admissible turning instance: the forbidden cell avoids the start
/// rows and the end columns.
pub fn turning_instances(n: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for s in subsets(n, n as usize - 2) {
        for t in subsets(n, n as usize - 2) {
            for y in (0..n).filter(|y| !s.contains(y)) {
                for x in (0..n).filter(|x| !t.contains(x)) {
                    out.push((s.clone(), t.clone(), (x, y)));
                }
            }
        }
    }
    out
}

/// Family-level checks for a solver output.
pub fn check_family(family: &[WalkPath], n: u64, starts: &[(u64, u64)], ends: &[(u64, u64)], f: (u64, u64), end: End) -> Result<(), String> {
    if family.len() as u64 != n - 2 {
        return Err(format!("{} walks, expected {}", family.len(), n - 2));
    }
    let mut all = HashSet::new();
    for w in family {
        let cells = xy(&w.cells);
        check_walk(&cells, n, end).map_err(|e| format!("{e}: {cells:?}"))?;
        if cells.contains(&f) {
            return Err("walk uses the forbidden square".into());
        }
        for c in cells {
            if !all.insert(c) {
                return Err(format!("walks overlap at {c:?}"));
            }
        }
    }
    let firsts: HashSet<(u64, u64)> = family.iter().map(|w| (w.first().x, w.first().y)).collect();
    let lasts: HashSet<(u64, u64)> = family.iter().map(|w| (w.last().x, w.last().y)).collect();
    if firsts != starts.iter().copied().collect() || lasts != ends.iter().copied().collect() {
        return Err("walks do not use exactly the given start and end squares".into());
    }
    Ok(())
}

/// Random self-avoiding level-`level` walk ending on the right (through) or
/// top (turning) edge.
pub fn random_walk(rng: &mut StdRng, n: u32, level: u32, kind: WalkKind) -> WalkPath {
    let side = CellIndex::side_count(n, level);
    loop {
        let start = (0, rng.gen_range(0..side));
        let mut path = vec![start];
        let mut seen = HashSet::from([start]);
        let done = |c: (u64, u64)| match kind {
            WalkKind::Through => c.0 == side - 1,
            WalkKind::Turning => c.1 == side - 1,
        };
        while !done(*path.last().unwrap()) {
            let (x, y) = *path.last().unwrap();
            let mut options: Vec<(u64, u64)> = [(x + 1, y), (x, y + 1), (x.wrapping_sub(1), y), (x, y.wrapping_sub(1))]
                .into_iter()
                .filter(|c| c.0 < side && c.1 < side && !seen.contains(c))
                .collect();
            if options.is_empty() {
                break;
            }
            // Bias toward progress so walks finish with reasonable length.
            if rng.gen_bool(0.5) {
                options.sort_by_key(|c| match kind {
                    WalkKind::Through => std::cmp::Reverse(c.0),
                    WalkKind::Turning => std::cmp::Reverse(c.1),
                });
            } else {
                options.shuffle(rng);
            }
            let next = options[0];
            seen.insert(next);
            path.push(next);
        }
        if done(*path.last().unwrap()) {
            let cells = path.into_iter().map(|(x, y)| CellIndex::new2(level, x, y)).collect();
            return WalkPath::new(level, kind, cells);
        }
    }
}

/// At most one forbidden child in each square of the walk.
pub fn random_forbidden(rng: &mut StdRng, walk: &WalkPath, n: u32) -> Vec<CellIndex> {
    let mut out = Vec::new();
    for c in &walk.cells {
        if rng.gen_bool(0.6) {
            let children = c.children(n, 2);
            out.push(children[rng.gen_range(0..children.len())]);
        }
    }
    out
}

/// Containment in the parent walk, avoidance of `forbidden`, disjointness
/// and the walk conditions for a refinement.
pub fn check_refinement(walk: &WalkPath, forbidden: &[CellIndex], n: u32, subs: &[WalkPath]) -> Result<(), String> {
    if subs.len() as u32 != n - 2 {
        return Err(format!("{} sub-walks, expected {}", subs.len(), n - 2));
    }
    let parent: HashSet<CellIndex> = walk.cells.iter().copied().collect();
    let bad: HashSet<CellIndex> = forbidden.iter().copied().collect();
    let side = CellIndex::side_count(n, walk.level + 1);
    let end = if walk.kind == WalkKind::Through { End::Right } else { End::Top };
    let mut used = HashSet::new();
    for s in subs {
        check_walk(&xy(&s.cells), side, end)?;
        for c in &s.cells {
            if !parent.contains(&c.parent(n).unwrap()) {
                return Err(format!("sub-walk leaves the walk at {c:?}"));
            }
            if bad.contains(c) {
                return Err(format!("sub-walk meets forbidden cell {c:?}"));
            }
            if !used.insert(*c) {
                return Err(format!("sub-walks overlap at {c:?}"));
            }
        }
    }
    Ok(())
}

/// Structure of a walk hierarchy checked against the tree: counts per
/// level, walk conditions, kept cells, disjointness, left-right crossing by
/// union-find, and containment in the parent walk.
pub fn check_hierarchy(h: &WalkHierarchy, tree: &dyn CellOracle) -> Result<(), String> {
    h.validate().map_err(|e| e.to_string())?;
    let n = h.n;
    for (k, level) in h.levels.iter().enumerate() {
        if level.len() != (n as usize - 2).pow(k as u32) {
            return Err(format!("level {k} has {} walks", level.len()));
        }
        let side = CellIndex::side_count(n, k as u32);
        let mut used = HashSet::new();
        for node in level {
            check_walk(&xy(&node.walk.cells), side, End::Right)?;
            for c in &node.walk.cells {
                if !tree.is_kept(c) {
                    return Err(format!("walk uses erased cell {c:?}"));
                }
                if !used.insert(*c) {
                    return Err(format!("level-{k} walks overlap at {c:?}"));
                }
            }
            if k >= 1 {
                if !crosses_lr(&node.walk.cells, n).map_err(|e| e.to_string())? {
                    return Err(format!("level-{k} walk has no left-right crossing"));
                }
                let parent = h.get(&node.word[..k - 1]).ok_or("missing parent walk")?;
                if !node.walk.cells.iter().all(|c| parent.cells.contains(&c.parent(n).unwrap())) {
                    return Err(format!("level-{k} walk leaves its parent"));
                }
            }
        }
    }
    Ok(())
}
