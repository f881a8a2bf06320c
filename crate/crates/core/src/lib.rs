//! Barrier constructions, boundary-decay exponents and a monotone
//! finite-difference solver for Dirichlet problems
//! `det D^2 u = F(x, u)` in a bounded convex domain with `u = 0` on the
//! boundary.

pub mod analysis;
pub mod barriers;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod record;
pub mod rhs;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{ConvexDomain, Point};

/// Library version, embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
