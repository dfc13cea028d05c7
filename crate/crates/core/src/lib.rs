//! Ideal triangulations, gluing equations and cone-deformation level sets.
//!
//! The crate parses face-pairing tables, builds the log-curvature map `G`
//! and the peripheral boundary map `H_L` with their Jacobians, checks the
//! exact rank and dimension statements for angle structures, and solves
//! `(G, H_L)(z) = (u, t)` numerically on positively oriented shapes.

pub mod angle;
pub mod checks;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod geometry;
pub mod gluing;
pub mod io;
pub mod peripheral;
pub mod solver;
pub mod triangulation;

pub use error::{Error, Result};
pub use gluing::{QuadIncidence, ShapeAssignment, ShapeConvention};
pub use io::TriFile;
pub use triangulation::{Orientation, Triangulation};
