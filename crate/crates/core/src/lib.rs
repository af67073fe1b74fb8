//! Partitioning plane line segments into the fewest subsets with no
//! crossing pairs.
//!
//! Segments that only share an endpoint may go in the same subset. The
//! problem is a coloring of the conflict graph, whose vertices are segments
//! and whose edges join intersecting pairs.

pub mod bitset;
pub mod cli;
pub mod conflict;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod harness;
pub mod instance;
pub mod solvers;
pub mod stats;

pub use error::{Error, Result};
