//! Bad subsegments of a basic segment and the boundary arc that avoids the
//! construction away from them.
//!
//! A subsegment of level `k + l` of the basic segment `S` (level `k`) is bad
//! when both squares of level `k + l` adjacent to it are kept. The bad
//! subsegments at depth `l` form `B_l`; `B_0` is `S` itself or empty. The
//! arc follows the segment along `B_levels` and replaces every maximal good
//! subsegment by a detour through the interior of an erased adjacent square.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridset::GridSet;
use crate::percolation::{CellIndex, CellOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `[(i-1)/n^k, i/n^k] × {j/n^k}`.
    Horizontal,
    /// `{j/n^k} × [(i-1)/n^k, i/n^k]`.
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicSegment {
    pub level: u32,
    pub i: u64,
    pub j: u64,
    pub orientation: Orientation,
}

impl BasicSegment {
    pub fn horizontal(level: u32, i: u64, j: u64) -> Self {
        BasicSegment { level, i, j, orientation: Orientation::Horizontal }
    }

    pub fn vertical(level: u32, i: u64, j: u64) -> Self {
        BasicSegment { level, i, j, orientation: Orientation::Vertical }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        if self.level < 1 {
            return Err(Error::usage("basic segments have level >= 1"));
        }
        let side = CellIndex::side_count(n, self.level);
        if self.i < 1 || self.i > side {
            return Err(Error::usage(format!("segment index i = {} outside 1..={side}", self.i)));
        }
        if self.j < 1 || self.j >= side {
            return Err(Error::usage(format!("grid line j = {} outside 1..{side}", self.j)));
        }
        Ok(())
    }

    /// Map (along, across) coordinates to the plane.
    fn point(&self, along: f64, across: f64) -> (f64, f64) {
        match self.orientation {
            Orientation::Horizontal => (along, across),
            Orientation::Vertical => (across, along),
        }
    }

    pub fn endpoints(&self, n: u32) -> ((f64, f64), (f64, f64)) {
        let s = CellIndex::side_count(n, self.level) as f64;
        let across = self.j as f64 / s;
        (self.point((self.i - 1) as f64 / s, across), self.point(self.i as f64 / s, across))
    }

    /// The two level-`level + l` squares adjacent to local subsegment `t`
    /// (0-based along the segment): below/left first, above/right second.
    pub fn adjacent_squares(&self, n: u32, l: u32, t: u64) -> (CellIndex, CellIndex) {
        let scale = CellIndex::side_count(n, l);
        let along = (self.i - 1) * scale + t;
        let line = self.j * scale;
        let level = self.level + l;
        match self.orientation {
            Orientation::Horizontal => (CellIndex::new2(level, along, line - 1), CellIndex::new2(level, along, line)),
            Orientation::Vertical => (CellIndex::new2(level, line - 1, along), CellIndex::new2(level, line, along)),
        }
    }
}

/// `B_0 ⊇ B_1 ⊇ … ⊇ B_levels`, with `B_l` stored as a one-dimensional set
/// of level `l` on the base-n grid of the segment.
#[derive(Clone, Debug, PartialEq)]
pub struct BadSet {
    pub segment: BasicSegment,
    pub levels: Vec<GridSet>,
}

impl BadSet {
    pub fn deepest(&self) -> &GridSet {
        self.levels.last().expect("B_0 always present")
    }

    pub fn is_nested(&self) -> bool {
        let n = self.deepest().n;
        self.levels.windows(2).all(|w| w[1].cells().iter().all(|c| w[0].contains(&c.parent(n).expect("level >= 1"))))
    }
}

fn check_depth<O: CellOracle + ?Sized>(tree: &O, segment: &BasicSegment, levels: u32) -> Result<()> {
    if tree.ambient_dim() != 2 {
        return Err(Error::usage("bad sets need a two-dimensional tree"));
    }
    segment.validate(tree.n())?;
    if segment.level + levels > tree.depth() {
        return Err(Error::usage(format!(
            "segment level {} + {levels} levels exceeds tree depth {}",
            segment.level,
            tree.depth()
        )));
    }
    Ok(())
}

pub fn build_bad_set<O: CellOracle + ?Sized>(tree: &O, segment: &BasicSegment, levels: u32) -> Result<BadSet> {
    check_depth(tree, segment, levels)?;
    let n = tree.n();
    let bad = |l: u32, t: u64| {
        let (a, b) = segment.adjacent_squares(n, l, t);
        tree.is_kept(&a) && tree.is_kept(&b)
    };
    let mut current: Vec<u64> = if bad(0, 0) { vec![0] } else { Vec::new() };
    let mut out = vec![GridSet::from_cells(n, 0, 1, current.iter().map(|&t| CellIndex::new1(0, t)))];
    for l in 1..=levels {
        current = current
            .iter()
            .flat_map(|&t| (0..u64::from(n)).map(move |d| t * u64::from(n) + d))
            .filter(|&t| bad(l, t))
            .collect();
        out.push(GridSet::from_cells(n, l, 1, current.iter().map(|&t| CellIndex::new1(l, t))));
    }
    Ok(BadSet { segment: *segment, levels: out })
}

/// One piece of the arc over a subsegment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcPiece {
    /// Depth `l` of the subsegment below the segment's own level.
    pub depth: u32,
    /// Local index along the segment at that depth.
    pub index: u64,
    /// Detour through an erased square, or the subsegment itself.
    pub detour: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcConstruction {
    pub segment: BasicSegment,
    pub n: u32,
    pub epsilon: f64,
    pub pieces: Vec<ArcPiece>,
    pub bad_set: BadSet,
}

impl ArcConstruction {
    /// The whole arc as one polyline.
    pub fn polyline(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for piece in &self.pieces {
            let skip = usize::from(!out.is_empty());
            out.extend(&piece.points[skip..]);
        }
        out
    }

    pub fn detour_count(&self) -> usize {
        self.pieces.iter().filter(|p| p.detour).count()
    }

    /// Largest distance from an arc vertex to the segment line. Every piece
    /// is convex over its subsegment, so vertices attain the maximum.
    pub fn max_offset(&self) -> f64 {
        let ((x0, y0), _) = self.segment.endpoints(self.n);
        self.pieces
            .iter()
            .flat_map(|p| &p.points)
            .map(|&(x, y)| match self.segment.orientation {
                Orientation::Horizontal => (y - y0).abs(),
                Orientation::Vertical => (x - x0).abs(),
            })
            .fold(0.0, f64::max)
    }
}

/// Arc from one endpoint of `segment` to the other within distance
/// `epsilon` of it. Over subsegments in `B_levels` it runs along the
/// segment; every other subsegment is crossed by a trapezoidal detour whose
/// interior lies inside an erased adjacent square.
pub fn build_boundary_arc<O: CellOracle + ?Sized>(
    tree: &O,
    segment: &BasicSegment,
    epsilon: f64,
    levels: u32,
) -> Result<ArcConstruction> {
    check_depth(tree, segment, levels)?;
    let n = tree.n();
    let finest = f64::from(n).powi(-((segment.level + levels) as i32));
    if epsilon.is_nan() || epsilon < 2.0 * finest {
        return Err(Error::usage(format!(
            "epsilon {epsilon} is below 2·n^-(k+levels) = {}",
            2.0 * finest
        )));
    }
    let bad_set = build_bad_set(tree, segment, levels)?;
    let mut pieces = Vec::new();
    emit(tree, segment, &bad_set, epsilon, 0, 0, levels, &mut pieces);
    Ok(ArcConstruction { segment: *segment, n, epsilon, pieces, bad_set })
}

#[allow(clippy::too_many_arguments)]
fn emit<O: CellOracle + ?Sized>(
    tree: &O,
    segment: &BasicSegment,
    bad_set: &BadSet,
    epsilon: f64,
    l: u32,
    t: u64,
    levels: u32,
    out: &mut Vec<ArcPiece>,
) {
    let n = tree.n();
    let level = segment.level + l;
    let s = CellIndex::side_count(n, level) as f64;
    let along0 = ((segment.i - 1) * CellIndex::side_count(n, l) + t) as f64 / s;
    let along1 = ((segment.i - 1) * CellIndex::side_count(n, l) + t + 1) as f64 / s;
    let across = (segment.j * CellIndex::side_count(n, l)) as f64 / s;
    if bad_set.levels[l as usize].contains(&CellIndex::new1(l, t)) {
        if l == levels {
            out.push(ArcPiece {
                depth: l,
                index: t,
                detour: false,
                points: vec![segment.point(along0, across), segment.point(along1, across)],
            });
        } else {
            for d in 0..u64::from(n) {
                emit(tree, segment, bad_set, epsilon, l + 1, t * u64::from(n) + d, levels, out);
            }
        }
        return;
    }
    let (low, _) = segment.adjacent_squares(n, l, t);
    // Prefer the erased side below/left; one of the two is erased.
    let dir = if tree.is_kept(&low) { 1.0 } else { -1.0 };
    let h = (1.0 / (3.0 * s)).min(epsilon / 2.0);
    out.push(ArcPiece {
        depth: l,
        index: t,
        detour: true,
        points: vec![
            segment.point(along0, across),
            segment.point(along0 + h, across + dir * h),
            segment.point(along1 - h, across + dir * h),
            segment.point(along1, across),
        ],
    });
}
