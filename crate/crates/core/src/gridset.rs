//! Digitized sets: occupied level-k cells of the base-n grid on `[0,1]` or
//! `[0,1]²`, with a run-length text format.
//!
//! ```text
//! GRIDSET 3 1
//! DIM 2
//! # any number of comment lines
//! R 0 0 3
//! R 1 0 1 1 1
//! R 2 0 3
//! ```
//!
//! Each `R y r0 r1 …` line lists alternating run lengths of empty and
//! occupied cells in row `y`, starting with an empty run (possibly 0). Rows
//! without occupied cells are omitted; trailing empty runs may be omitted.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::percolation::CellIndex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSet {
    pub n: u32,
    pub level: u32,
    pub dim: u8,
    cells: Vec<CellIndex>,
    /// Free-form provenance lines, written as `#` comments.
    pub provenance: Vec<String>,
}

impl GridSet {
    pub fn empty(n: u32, level: u32, dim: u8) -> Self {
        assert!(n >= 2 && (dim == 1 || dim == 2), "invalid grid n={n} dim={dim}");
        GridSet { n, level, dim, cells: Vec::new(), provenance: Vec::new() }
    }

    /// Grid set from level-`level` cells; duplicates are merged.
    ///
    /// Panics if a cell is of the wrong level or out of range.
    pub fn from_cells(n: u32, level: u32, dim: u8, cells: impl IntoIterator<Item = CellIndex>) -> Self {
        Self::try_from_cells(n, level, dim, cells).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_from_cells(n: u32, level: u32, dim: u8, cells: impl IntoIterator<Item = CellIndex>) -> Result<Self> {
        if n < 2 {
            return Err(Error::usage(format!("n must be >= 2, got {n}")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::usage(format!("dim must be 1 or 2, got {dim}")));
        }
        let mut cells: Vec<CellIndex> = cells.into_iter().collect();
        for c in &cells {
            if c.level != level || !c.in_range(n) || (dim == 1 && c.y != 0) {
                return Err(Error::usage(format!("cell {c:?} does not belong to the level-{level} grid")));
            }
        }
        cells.sort_unstable();
        cells.dedup();
        Ok(GridSet { n, level, dim, cells, provenance: Vec::new() })
    }

    /// Every cell of the level.
    pub fn full(n: u32, level: u32, dim: u8) -> Self {
        let side = CellIndex::side_count(n, level);
        let rows = if dim == 1 { 1 } else { side };
        let cells = (0..rows).flat_map(|y| (0..side).map(move |x| CellIndex::new2(level, x, y)));
        Self::from_cells(n, level, dim, cells)
    }

    pub fn with_provenance(mut self, lines: impl IntoIterator<Item = String>) -> Self {
        self.provenance.extend(lines);
        self
    }

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

    /// Cells per axis at this level.
    pub fn side_count(&self) -> u64 {
        CellIndex::side_count(self.n, self.level)
    }

    /// Distinct level-`j` ancestors of the occupied cells.
    pub fn coarsen(&self, j: u32) -> GridSet {
        assert!(j <= self.level, "cannot refine by coarsening");
        let mut cells: Vec<CellIndex> = self.cells.iter().map(|c| c.ancestor(self.n, j)).collect();
        cells.dedup();
        cells.sort_unstable();
        cells.dedup();
        GridSet { n: self.n, level: j, dim: self.dim, cells, provenance: self.provenance.clone() }
    }

    /// Number of occupied level-`j` boxes.
    pub fn count_at(&self, j: u32) -> u64 {
        self.coarsen(j).len() as u64
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("GRIDSET {} {}\nDIM {}\n", self.n, self.level, self.dim);
        for line in &self.provenance {
            for part in line.lines() {
                let _ = writeln!(out, "# {part}");
            }
        }
        let mut i = 0;
        while i < self.cells.len() {
            let y = self.cells[i].y;
            let _ = write!(out, "R {y}");
            let mut cursor = 0u64;
            while i < self.cells.len() && self.cells[i].y == y {
                let start = self.cells[i].x;
                let mut end = start + 1;
                i += 1;
                while i < self.cells.len() && self.cells[i].y == y && self.cells[i].x == end {
                    end += 1;
                    i += 1;
                }
                let _ = write!(out, " {} {}", start - cursor, end - start);
                cursor = end;
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GridSet> {
        let parse_err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 || head[0] != "GRIDSET" {
            return Err(parse_err(hl, "expected `GRIDSET n k`"));
        }
        let n: u32 = head[1].parse().map_err(|_| parse_err(hl, "bad n"))?;
        let level: u32 = head[2].parse().map_err(|_| parse_err(hl, "bad k"))?;
        if n < 2 {
            return Err(parse_err(hl, "n must be >= 2"));
        }
        if u64::from(n).checked_pow(level).is_none() {
            return Err(parse_err(hl, "grid too fine"));
        }
        let side = CellIndex::side_count(n, level);
        let mut dim: Option<u8> = None;
        let mut provenance = Vec::new();
        let mut cells = Vec::new();
        let mut last_row: Option<u64> = None;
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                provenance.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
            let mut toks = line.split_whitespace();
            match toks.next() {
                Some("DIM") => {
                    if dim.is_some() {
                        return Err(parse_err(ln, "duplicate DIM line"));
                    }
                    let d: u8 = toks.next().and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(ln, "bad DIM"))?;
                    if d != 1 && d != 2 {
                        return Err(parse_err(ln, "DIM must be 1 or 2"));
                    }
                    dim = Some(d);
                }
                Some("R") => {
                    let d = dim.ok_or_else(|| parse_err(ln, "row before DIM line"))?;
                    let nums: Vec<u64> = toks
                        .map(|t| t.parse::<u64>().map_err(|_| parse_err(ln, "bad number")))
                        .collect::<Result<_>>()?;
                    let (&y, runs) = nums.split_first().ok_or_else(|| parse_err(ln, "row without index"))?;
                    if y >= side || (d == 1 && y != 0) {
                        return Err(parse_err(ln, "row index out of range"));
                    }
                    if last_row.is_some_and(|r| r >= y) {
                        return Err(parse_err(ln, "rows must be strictly ascending"));
                    }
                    last_row = Some(y);
                    let mut x = 0u64;
                    for (i, &run) in runs.iter().enumerate() {
                        let end = x.checked_add(run).filter(|&e| e <= side).ok_or_else(|| parse_err(ln, "row overflows the grid"))?;
                        if i % 2 == 1 {
                            cells.extend((x..end).map(|cx| CellIndex::new2(level, cx, y)));
                        }
                        x = end;
                    }
                }
                _ => return Err(parse_err(ln, "unrecognized line")),
            }
        }
        let dim = dim.ok_or_else(|| parse_err(hl, "missing DIM line"))?;
        let mut set = GridSet::try_from_cells(n, level, dim, cells)?;
        set.provenance = provenance;
        Ok(set)
    }
}
