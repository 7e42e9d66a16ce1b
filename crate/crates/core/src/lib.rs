//! Exact computation of non-archimedean Monge–Ampère measures in combinatorial form.
//!
//! The modules build on each other bottom-up: [`polyhedra`] supplies exact
//! polytopes, [`cocycle`] the quadratic period data, [`plfunc`] periodic
//! piecewise-linear functions and their cell complexes, [`approx`] transversal
//! approximations, [`ma`] real Monge–Ampère measures, and [`skeleton`] the
//! face-level measure and degree formulas. [`json`] holds the shared
//! serialization formats.

pub mod approx;
pub mod cocycle;
pub mod error;
pub mod json;
pub mod linalg;
pub mod ma;
pub mod plfunc;
pub mod polyhedra;
pub mod skeleton;

pub use error::{Error, Result};
