//! Exact spectra and spectral pairs of plane curve singularities, computed from decorated
//! resolution trees, together with the cut-and-paste calculus that expresses every spectrum
//! through basic types and the inequalities built on it.

pub mod basic;
pub mod bounds;
pub mod error;
pub mod expr;
pub mod families;
pub mod formulas;
pub mod graph;
pub mod linalg;
pub mod newton;
pub mod rational;
pub mod recombination;
pub mod spectrum;

pub use error::{Error, Result};
