//! m-fullness: a kept square is 0-full, and m-full when at least `N² - 1`
//! of its sub-squares are (m-1)-full.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::percolation::{CellIndex, CellOracle};

/// Memoized fullness queries against one tree.
pub struct FullnessCache<'a, O: CellOracle + ?Sized> {
    tree: &'a O,
    memo: HashMap<(CellIndex, u32), bool>,
}

impl<'a, O: CellOracle + ?Sized> FullnessCache<'a, O> {
    pub fn new(tree: &'a O) -> Result<Self> {
        if tree.ambient_dim() != 2 {
            return Err(Error::usage("fullness is defined for two-dimensional trees"));
        }
        Ok(FullnessCache { tree, memo: HashMap::new() })
    }

    pub fn tree(&self) -> &'a O {
        self.tree
    }

    fn check_depth(&self, cell: &CellIndex, m: u32) -> Result<()> {
        if cell.level + m > self.tree.depth() {
            return Err(Error::usage(format!(
                "cell level {} + m {m} exceeds tree depth {}",
                cell.level,
                self.tree.depth()
            )));
        }
        Ok(())
    }

    pub fn is_full(&mut self, cell: &CellIndex, m: u32) -> Result<bool> {
        self.check_depth(cell, m)?;
        Ok(self.full(cell, m))
    }

    fn full(&mut self, cell: &CellIndex, m: u32) -> bool {
        if !self.tree.is_kept(cell) {
            return false;
        }
        if m == 0 {
            return true;
        }
        if let Some(&v) = self.memo.get(&(*cell, m)) {
            return v;
        }
        let mut misses = 0;
        for child in cell.children(self.tree.n(), 2) {
            if !self.full(&child, m - 1) {
                misses += 1;
                if misses > 1 {
                    break;
                }
            }
        }
        let v = misses <= 1;
        self.memo.insert((*cell, m), v);
        v
    }

    /// Sub-squares of `cell` that are not `m`-full, in row-major order.
    pub fn non_full_children(&mut self, cell: &CellIndex, m: u32) -> Result<Vec<CellIndex>> {
        self.check_depth(cell, m + 1)?;
        Ok(cell
            .children(self.tree.n(), 2)
            .into_iter()
            .filter(|c| !self.full(c, m))
            .collect())
    }
}

pub fn is_m_full<O: CellOracle + ?Sized>(tree: &O, cell: &CellIndex, m: u32) -> Result<bool> {
    FullnessCache::new(tree)?.is_full(cell, m)
}

/// Fullness verdicts of one cell for every `m' ≤ certified_depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullnessReport {
    pub cell: CellIndex,
    pub certified_depth: u32,
    pub verdicts: Vec<bool>,
}

impl FullnessReport {
    /// Whether the cell is `certified_depth`-full.
    pub fn is_full(&self) -> bool {
        self.verdicts.last().copied().unwrap_or(false)
    }

    /// Largest `m'` with a positive verdict.
    pub fn max_full(&self) -> Option<u32> {
        self.verdicts.iter().rposition(|&v| v).map(|i| i as u32)
    }

    pub fn is_monotone(&self) -> bool {
        self.verdicts.windows(2).all(|w| w[0] || !w[1])
    }
}

pub fn fullness_report<O: CellOracle + ?Sized>(tree: &O, cell: &CellIndex, m: u32) -> Result<FullnessReport> {
    let mut cache = FullnessCache::new(tree)?;
    cache.check_depth(cell, m)?;
    let verdicts = (0..=m).map(|k| cache.full(cell, k)).collect();
    Ok(FullnessReport { cell: *cell, certified_depth: m, verdicts })
}
