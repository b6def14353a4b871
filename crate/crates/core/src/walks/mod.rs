//! Walks of grid squares and the constructions built from them: level-1
//! through and turning walks, refinement of a walk into sub-walks avoiding a
//! forbidden system, fullness certificates, and the nested walk hierarchy
//! with its edge Cantor set and projection.

mod dihedral;
mod fullness;
mod hierarchy;
mod refine;
mod solver;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percolation::CellIndex;

pub use dihedral::Side;
pub use fullness::{fullness_report, is_m_full, FullnessCache, FullnessReport};
pub use hierarchy::{
    edge_cantor, edge_cantor_gridset, extract_hierarchy, project_phi, word_label, EdgeInterval, HierarchyNode, PhiIndex,
    WalkHierarchy,
};
pub use refine::refine_walk;
pub use solver::{through_walks, turning_walks};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    /// Ends on the right edge `x = 1`.
    Through,
    /// Ends on the top edge `y = 1`.
    Turning,
}

/// Ordered sequence of pairwise distinct, consecutively side-sharing cells
/// of one level, starting on the left edge of the unit square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub level: u32,
    pub kind: WalkKind,
    pub cells: Vec<CellIndex>,
}

impl WalkPath {
    pub fn new(level: u32, kind: WalkKind, cells: Vec<CellIndex>) -> Self {
        WalkPath { level, kind, cells }
    }

    /// The only walk of level 0: the unit square itself.
    pub fn root() -> Self {
        WalkPath { level: 0, kind: WalkKind::Through, cells: vec![CellIndex::ROOT] }
    }

    pub fn first(&self) -> &CellIndex {
        &self.cells[0]
    }

    pub fn last(&self) -> &CellIndex {
        &self.cells[self.cells.len() - 1]
    }

    /// Check every walk invariant on the base-`n` grid.
    pub fn validate(&self, n: u32) -> Result<()> {
        let bad = |msg: String| Err(Error::construction(format!("invalid walk: {msg}")));
        if self.cells.is_empty() {
            return bad("no cells".into());
        }
        let side = CellIndex::side_count(n, self.level);
        let mut seen = HashSet::with_capacity(self.cells.len());
        for c in &self.cells {
            if c.level != self.level {
                return bad(format!("cell {c:?} is not of level {}", self.level));
            }
            if !c.in_range(n) {
                return bad(format!("cell {c:?} out of range"));
            }
            if !seen.insert((c.x, c.y)) {
                return bad(format!("cell {c:?} repeated"));
            }
        }
        for w in self.cells.windows(2) {
            if !abutting(&w[0], &w[1]) {
                return bad(format!("{:?} and {:?} do not share a side", w[0], w[1]));
            }
        }
        if self.first().x != 0 {
            return bad("first cell misses the left edge".into());
        }
        let last = self.last();
        match self.kind {
            WalkKind::Through if last.x != side - 1 => bad("last cell misses the right edge".into()),
            WalkKind::Turning if last.y != side - 1 => bad("last cell misses the top edge".into()),
            _ => Ok(()),
        }
    }

    /// Whether any cell of the walk is in `cells`.
    pub fn meets(&self, cells: &HashSet<CellIndex>) -> bool {
        self.cells.iter().any(|c| cells.contains(c))
    }
}

/// Cells share a side of positive length.
pub fn abutting(a: &CellIndex, b: &CellIndex) -> bool {
    a.level == b.level && a.x.abs_diff(b.x) + a.y.abs_diff(b.y) == 1
}

/// Whether a family of walks is pairwise cell-disjoint.
pub fn pairwise_disjoint(walks: &[WalkPath]) -> bool {
    let mut seen = HashSet::new();
    walks.iter().flat_map(|w| &w.cells).all(|c| seen.insert(*c))
}
