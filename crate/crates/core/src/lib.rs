//! Numerical laboratory for Markovian behaviour of small open quantum
//! systems.
//!
//! * [`linalg`]: dense complex matrices, partial traces, exponentials,
//!   entropy and trace distance.
//! * [`spectral`]: spectral densities, memory kernels and the Green's
//!   function equations of a level system coupled to a continuum.
//! * [`dynmap`]: exact composite evolution, super maps and divisibility
//!   tests.
//! * [`master`]: time-local master-equation checks for the reduced state.

pub mod dynmap;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod master;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::TimeGrid;
