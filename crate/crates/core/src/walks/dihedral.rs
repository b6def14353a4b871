//! Symmetries of an `size × size` block of cells.

use serde::{Deserialize, Serialize};

/// Local cell position inside a block; `y` grows upward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Pos {
    pub x: u32,
    pub y: u32,
}

impl Pos {
    pub fn new(x: u32, y: u32) -> Self {
        Pos { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    fn normal(self) -> (i32, i32) {
        match self {
            Side::Left => (-1, 0),
            Side::Right => (1, 0),
            Side::Bottom => (0, -1),
            Side::Top => (0, 1),
        }
    }

    fn from_normal(v: (i32, i32)) -> Side {
        match v {
            (-1, 0) => Side::Left,
            (1, 0) => Side::Right,
            (0, -1) => Side::Bottom,
            (0, 1) => Side::Top,
            _ => unreachable!("not a unit normal"),
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
        }
    }

    /// Whether positions along this side are measured by `x`.
    pub(crate) fn is_horizontal(self) -> bool {
        matches!(self, Side::Bottom | Side::Top)
    }

    /// Coordinate of `p` along this side.
    pub(crate) fn along(self, p: Pos) -> u32 {
        if self.is_horizontal() {
            p.x
        } else {
            p.y
        }
    }

    /// The cell adjacent to this side at position `along`.
    pub(crate) fn cell_at(self, along: u32, size: u32) -> Pos {
        match self {
            Side::Left => Pos::new(0, along),
            Side::Right => Pos::new(size - 1, along),
            Side::Bottom => Pos::new(along, 0),
            Side::Top => Pos::new(along, size - 1),
        }
    }
}

/// Element of the dihedral group: optional transpose followed by optional
/// reflections of each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Dihedral {
    swap: bool,
    flip_x: bool,
    flip_y: bool,
}

impl Dihedral {
    pub const FLIP_Y: Dihedral = Dihedral { swap: false, flip_x: false, flip_y: true };
    pub const ROTATE_HALF: Dihedral = Dihedral { swap: false, flip_x: true, flip_y: true };

    pub fn all() -> impl Iterator<Item = Dihedral> {
        (0..8u8).map(|b| Dihedral { swap: b & 4 != 0, flip_x: b & 2 != 0, flip_y: b & 1 != 0 })
    }

    pub fn apply(self, p: Pos, size: u32) -> Pos {
        let (u, v) = if self.swap { (p.y, p.x) } else { (p.x, p.y) };
        Pos::new(
            if self.flip_x { size - 1 - u } else { u },
            if self.flip_y { size - 1 - v } else { v },
        )
    }

    pub fn invert(self, p: Pos, size: u32) -> Pos {
        let u = if self.flip_x { size - 1 - p.x } else { p.x };
        let v = if self.flip_y { size - 1 - p.y } else { p.y };
        if self.swap {
            Pos::new(v, u)
        } else {
            Pos::new(u, v)
        }
    }

    pub fn apply_side(self, s: Side) -> Side {
        let (dx, dy) = s.normal();
        let (u, v) = if self.swap { (dy, dx) } else { (dx, dy) };
        Side::from_normal((if self.flip_x { -u } else { u }, if self.flip_y { -v } else { v }))
    }

    /// First transform (in a fixed enumeration order) sending `from` to
    /// `to_from` and `exit` to `to_exit`.
    pub fn mapping(from: Side, exit: Side, to_from: Side, to_exit: Side) -> Option<Dihedral> {
        Dihedral::all().find(|g| g.apply_side(from) == to_from && g.apply_side(exit) == to_exit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trips() {
        for g in Dihedral::all() {
            for x in 0..5 {
                for y in 0..5 {
                    let p = Pos::new(x, y);
                    assert_eq!(g.invert(g.apply(p, 5), 5), p);
                }
            }
        }
    }

    #[test]
    fn side_action_matches_cell_action() {
        let size = 4;
        for g in Dihedral::all() {
            for side in [Side::Left, Side::Right, Side::Bottom, Side::Top] {
                let image = g.apply_side(side);
                for a in 0..size {
                    let moved = g.apply(side.cell_at(a, size), size);
                    let on_edge = match image {
                        Side::Left => moved.x == 0,
                        Side::Right => moved.x == size - 1,
                        Side::Bottom => moved.y == 0,
                        Side::Top => moved.y == size - 1,
                    };
                    assert!(on_edge, "{g:?} {side:?}");
                }
            }
        }
    }

    #[test]
    fn every_side_pair_has_a_canonical_map() {
        let sides = [Side::Left, Side::Right, Side::Bottom, Side::Top];
        for &a in &sides {
            for &b in &sides {
                if a == b {
                    continue;
                }
                let target = if b == a.opposite() { Side::Right } else { Side::Top };
                assert!(Dihedral::mapping(a, b, Side::Left, target).is_some());
            }
        }
    }
}
