//! Numerical toolkit for the relaxed isentropic Euler system in two space
//! dimensions on the periodic space-time torus.
//!
//! Unknowns of the relaxed system are ordered `(ρ, m1, m2, M11, M12, Q)` with
//! `M22 = -M11`; potentials have nine components.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod laminate;
pub mod report;
pub mod shear;
pub mod states;
pub mod symbol;
pub mod torus;

pub use error::{Error, Result};
