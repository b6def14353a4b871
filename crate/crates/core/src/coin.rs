//! Stateless per-cell coins.
//!
//! Every cell carries a 64-bit key derived from its parent's key and its
//! position among the parent's children; the root key is derived from the
//! master seed and the ambient dimension. The coin of a cell is the top 53
//! bits of its key read as a uniform value in `[0, 1)`. A cell is kept iff its
//! coin is below `p` (and its parent is kept), so trees built from one seed at
//! different `p` are nested.

use crate::percolation::CellIndex;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const ROOT_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const CHILD_SALT: u64 = 0xA076_1D64_78BD_642F;

/// splitmix64 finalizer.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed from a master seed and a counter
/// (trial index, sweep point, ...).
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

#[inline]
pub(crate) fn root_key(seed: u64, ambient_dim: u8) -> u64 {
    mix64(seed.wrapping_mul(GOLDEN) ^ ROOT_SALT ^ u64::from(ambient_dim))
}

/// Key of the child at position `slot` (row-major inside the parent).
#[inline(always)]
pub(crate) fn child_key(parent_key: u64, slot: u64) -> u64 {
    mix64(parent_key ^ CHILD_SALT.wrapping_mul(slot.wrapping_add(1)))
}

/// `child_key(parent, slot) == mix64(parent ^ child_salts(b)[slot])`.
pub(crate) fn child_salts(branching: u64) -> Vec<u64> {
    (0..branching).map(|slot| CHILD_SALT.wrapping_mul(slot.wrapping_add(1))).collect()
}

/// The 53-bit mantissa used for the coin.
#[inline(always)]
pub(crate) fn key_mantissa(key: u64) -> u64 {
    key >> 11
}

#[inline(always)]
pub(crate) fn key_to_unit(key: u64) -> f64 {
    key_mantissa(key) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Integer threshold `t` with `mantissa < t  <=>  coin < p`.
#[inline]
pub(crate) fn keep_threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1u64 << 53
    } else {
        (p * (1u64 << 53) as f64).ceil() as u64
    }
}

/// Key of an arbitrary cell, recomputed from the root by walking the
/// ancestry.
pub fn cell_key(seed: u64, ambient_dim: u8, n: u32, cell: &CellIndex) -> u64 {
    let mut key = root_key(seed, ambient_dim);
    let n = u64::from(n);
    for l in 1..=cell.level {
        let shift = cell.level - l;
        let scale = n.pow(shift);
        let x = cell.x / scale;
        let y = cell.y / scale;
        let slot = (y % n) * n + (x % n);
        key = child_key(key, slot);
    }
    key
}

/// Uniform coin in `[0, 1)` for `cell`. Purely a function of the seed, the
/// ambient dimension, the subdivision factor and the cell address; it does
/// not depend on `p`. The root coin is defined as 0 (the root is always kept).
pub fn cell_coin(seed: u64, ambient_dim: u8, n: u32, cell: &CellIndex) -> f64 {
    if cell.level == 0 {
        return 0.0;
    }
    key_to_unit(cell_key(seed, ambient_dim, n, cell))
}
