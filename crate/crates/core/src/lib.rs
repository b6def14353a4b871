//! Fractal percolation laboratory.
//!
//! Simulates the random recursive construction on `[0,1]` and `[0,1]²`,
//! extracts the walk hierarchies and edge Cantor sets that witness lower
//! bounds on topological Hausdorff dimension, builds the boundary arcs behind
//! the matching upper bound, and estimates dimensions by box counting on
//! deterministic reference fractals.

pub mod arc;
pub mod boxcount;
pub mod coin;
pub mod connectivity;
pub mod error;
pub mod extinction;
pub mod gallery;
pub mod gridset;
pub mod percolation;
pub mod reference;
pub mod render;
pub mod walks;

pub use error::{Error, Result};
pub use percolation::{CellIndex, CellOracle, LazyTree, PercolationParams, PercolationTree};

/// Tool version embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
