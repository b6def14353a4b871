//! Nested walk systems `G_0, G_1, …, G_m` inside a full tree, the edge set
//! `C_m` traced on the left edge, and the projection `φ`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::fullness::{fullness_report, FullnessCache};
use super::refine::refine_walk;
use super::WalkPath;
use crate::error::{Error, Result};
use crate::gridset::GridSet;
use crate::percolation::{CellIndex, CellOracle};

/// One walk of the hierarchy, addressed by its branch word in
/// `{1, …, N-2}^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyNode {
    pub word: Vec<u32>,
    pub walk: WalkPath,
}

/// `levels[k]` holds the `(N-2)^k` level-k walks in lexicographic word order,
/// so the children of node `i` at level `k` are the nodes
/// `i·(N-2) .. (i+1)·(N-2)` at level `k+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkHierarchy {
    pub n: u32,
    pub branching: u32,
    pub depth: u32,
    pub levels: Vec<Vec<HierarchyNode>>,
}

pub fn word_label(word: &[u32]) -> String {
    if word.is_empty() {
        return "()".to_string();
    }
    word.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
}

impl WalkHierarchy {
    pub fn get(&self, word: &[u32]) -> Option<&WalkPath> {
        let b = self.branching as usize;
        let mut idx = 0usize;
        for &i in word {
            if i == 0 || i > self.branching {
                return None;
            }
            idx = idx * b + (i as usize - 1);
        }
        self.levels.get(word.len()).and_then(|l| l.get(idx)).map(|node| &node.walk)
    }

    pub fn deepest(&self) -> &[HierarchyNode] {
        &self.levels[self.depth as usize]
    }

    /// Check every structural invariant: walk validity, counts, nesting of
    /// children inside their parent walk, and sibling disjointness.
    pub fn validate(&self) -> Result<()> {
        let b = self.branching as usize;
        for (k, level) in self.levels.iter().enumerate() {
            if level.len() != b.pow(k as u32) {
                return Err(Error::construction(format!("level {k} has {} walks", level.len())));
            }
            for node in level {
                node.walk.validate(self.n)?;
                if node.walk.level as usize != k || node.word.len() != k {
                    return Err(Error::construction(format!("node {} sits at the wrong level", word_label(&node.word))));
                }
            }
            if k == 0 {
                continue;
            }
            for (i, parent) in self.levels[k - 1].iter().enumerate() {
                let parent_cells: std::collections::HashSet<CellIndex> = parent.walk.cells.iter().copied().collect();
                let children = &level[i * b..(i + 1) * b];
                for child in children {
                    if child.word[..k - 1] != parent.word[..] {
                        return Err(Error::construction("child word does not extend its parent"));
                    }
                    if child.walk.cells.iter().any(|c| !parent_cells.contains(&c.parent(self.n).expect("k >= 1"))) {
                        return Err(Error::construction(format!(
                            "walk {} leaves its parent",
                            word_label(&child.word)
                        )));
                    }
                }
                let walks: Vec<WalkPath> = children.iter().map(|c| c.walk.clone()).collect();
                if !super::pairwise_disjoint(&walks) {
                    return Err(Error::construction(format!("children of {} overlap", word_label(&parent.word))));
                }
            }
        }
        Ok(())
    }

    /// Branch word → ordered `[x, y]` cell list, for every level.
    pub fn to_json(&self) -> Value {
        let mut nodes = serde_json::Map::new();
        for level in &self.levels {
            for node in level {
                let cells: Vec<[u64; 2]> = node.walk.cells.iter().map(|c| [c.x, c.y]).collect();
                nodes.insert(word_label(&node.word), json!({ "level": node.walk.level, "cells": cells }));
            }
        }
        json!({ "n": self.n, "branching": self.branching, "depth": self.depth, "walks": nodes })
    }
}

/// Nested systems of `N - 2` disjoint through walks per parent walk, down to
/// level `m`, inside a tree whose root is m-full. At each refinement the
/// forbidden cells are the sub-squares that are not full enough; fullness
/// guarantees at most one per square.
pub fn extract_hierarchy<O: CellOracle + ?Sized>(tree: &O, m: u32) -> Result<WalkHierarchy> {
    let n = tree.n();
    if n < 6 {
        return Err(Error::usage(format!("walk hierarchies need n >= 6, got {n}")));
    }
    if tree.ambient_dim() != 2 {
        return Err(Error::usage("walk hierarchies need a two-dimensional tree"));
    }
    if m > tree.depth() {
        return Err(Error::usage(format!("m = {m} exceeds tree depth {}", tree.depth())));
    }
    let report = fullness_report(tree, &CellIndex::ROOT, m)?;
    if let Some(k) = report.verdicts.iter().position(|&v| !v) {
        return Err(Error::usage(format!("root is not {k}-full, so no fullness certificate to depth {m}")));
    }

    let mut cache = FullnessCache::new(tree)?;
    let mut levels = vec![vec![HierarchyNode { word: Vec::new(), walk: WalkPath::root() }]];
    for k in 0..m {
        let need = m - k - 1;
        let parents = &levels[k as usize];
        let forbidden: Vec<Vec<CellIndex>> = parents
            .iter()
            .map(|node| {
                let mut f = Vec::new();
                for cell in &node.walk.cells {
                    f.extend(cache.non_full_children(cell, need)?);
                }
                Ok(f)
            })
            .collect::<Result<_>>()?;
        let refined: Vec<Vec<WalkPath>> = parents
            .par_iter()
            .zip(forbidden.par_iter())
            .map(|(node, f)| {
                refine_walk(&node.walk, f, n).map_err(|e| match e {
                    Error::Usage(msg) => Error::construction(format!("refining {}: {msg}", word_label(&node.word))),
                    other => other,
                })
            })
            .collect::<Result<_>>()?;
        let next = parents
            .iter()
            .zip(refined)
            .flat_map(|(node, subs)| {
                subs.into_iter().enumerate().map(move |(i, walk)| {
                    let mut word = node.word.clone();
                    word.push(i as u32 + 1);
                    HierarchyNode { word, walk }
                })
            })
            .collect();
        levels.push(next);
    }
    let hier = WalkHierarchy { n, branching: n - 2, depth: m, levels };
    for node in hier.levels.iter().flatten() {
        if node.walk.cells.iter().any(|c| !tree.is_kept(c)) {
            return Err(Error::construction(format!("walk {} uses an erased cell", word_label(&node.word))));
        }
    }
    Ok(hier)
}

/// One interval of `C_m`: `[index, index + 1] · N^-level` on the left edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeInterval {
    pub word: Vec<u32>,
    pub level: u32,
    pub index: u64,
    pub lo: f64,
    pub hi: f64,
}

impl EdgeInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// `C_m`: the left-edge traces of the first squares of the level-m walks,
/// sorted by position.
pub fn edge_cantor(hier: &WalkHierarchy) -> Vec<EdgeInterval> {
    let side = f64::from(hier.n).powi(-(hier.depth as i32));
    let mut out: Vec<EdgeInterval> = hier
        .deepest()
        .iter()
        .map(|node| {
            let y = node.walk.first().y;
            EdgeInterval {
                word: node.word.clone(),
                level: hier.depth,
                index: y,
                lo: y as f64 * side,
                hi: (y + 1) as f64 * side,
            }
        })
        .collect();
    out.sort_by_key(|e| e.index);
    out
}

/// `C_m` as a one-dimensional grid set on the base-N grid.
pub fn edge_cantor_gridset(hier: &WalkHierarchy) -> GridSet {
    GridSet::from_cells(hier.n, hier.depth, 1, edge_cantor(hier).iter().map(|e| CellIndex::new1(hier.depth, e.index)))
}

/// Lookup from level-m cells to the first branch owning them, for repeated
/// projections.
pub struct PhiIndex {
    n: u32,
    depth: u32,
    owner: HashMap<(u64, u64), (usize, f64)>,
}

impl PhiIndex {
    pub fn new(hier: &WalkHierarchy) -> Self {
        let side = f64::from(hier.n).powi(-(hier.depth as i32));
        let mut owner = HashMap::new();
        for (rank, node) in hier.deepest().iter().enumerate() {
            let y = node.walk.first().y;
            let mid = (y as f64 + 0.5) * side;
            for c in &node.walk.cells {
                owner.entry((c.x, c.y)).or_insert((rank, mid));
            }
        }
        PhiIndex { n: hier.n, depth: hier.depth, owner }
    }

    /// Midpoint of the `C_m` interval of the lexicographically first level-m
    /// walk with a square containing `z`, or `None` outside every walk.
    pub fn project(&self, z: (f64, f64)) -> Option<f64> {
        let (x, y) = z;
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return None;
        }
        let side = CellIndex::side_count(self.n, self.depth);
        let s = side as f64;
        let candidates = |t: f64| -> Vec<u64> {
            let u = t * s;
            let f = u.floor();
            let mut v = Vec::with_capacity(2);
            if (f as u64) < side {
                v.push(f as u64);
            }
            if u == f && f >= 1.0 {
                v.push(f as u64 - 1);
            }
            v
        };
        let mut best: Option<(usize, f64)> = None;
        for cx in candidates(x) {
            for cy in candidates(y) {
                if let Some(&hit) = self.owner.get(&(cx, cy)) {
                    if best.is_none_or(|b| hit.0 < b.0) {
                        best = Some(hit);
                    }
                }
            }
        }
        best.map(|b| b.1)
    }
}

/// `φ(z)`; see [`PhiIndex::project`].
pub fn project_phi(z: (f64, f64), hier: &WalkHierarchy) -> Option<f64> {
    PhiIndex::new(hier).project(z)
}
