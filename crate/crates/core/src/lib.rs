//! Numerical verification of Levinson's theorem as an index identity for
//! one-dimensional scattering: the winding number of the boundary loop of a
//! wave operator equals minus the number of bound states.

pub mod config;
pub mod error;
pub mod extended;
pub mod linalg;
pub mod operator;
pub mod paths;
pub mod point;
pub mod potential;
pub mod report;

pub use error::{Error, Result};
pub use extended::Extended;
pub use linalg::Mat2;
pub use paths::{BoundaryLoop, BoundaryPath, ResonanceClass, Sector, Side, WindingReport, Windings};
