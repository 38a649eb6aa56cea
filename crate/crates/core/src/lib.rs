//! Heat-equation vineyards of persistence diagrams on gridded surfaces.
//!
//! Two scalar fields on an n×n mesh are joined by a Jacobi heat flow; the
//! persistence diagrams of the intermediate fields are tracked by adjacent
//! transpositions into vines, and summarized by matching distances and
//! simple statistics.

pub mod analytics;
pub mod complex;
pub mod error;
pub mod grid;
pub mod heat;
pub mod io;
pub mod matching;
pub mod persistence;
pub mod pipeline;
pub mod synth;
pub mod vineyard;

pub use error::{Error, Result};
