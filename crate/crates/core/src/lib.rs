//! Production-cost and transmission-expansion modeling for a multi-
//! interconnection grid.

pub mod analytics;
pub mod error;
pub mod expansion;
pub mod fixtures;
pub mod grid;
pub mod lp;
pub mod opf;
pub mod scenario;
pub mod util;

pub use error::GridError;
pub use grid::*;
