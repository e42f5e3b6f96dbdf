//! Weighted soliton invariants and valuative stability data on toric log Fano
//! polytopes, plus a one-dimensional real Monge–Ampère solver.
//!
//! The polytope layer is exact (rational arithmetic); everything downstream of
//! the triangulation is floating point.

pub mod error;
pub mod invariants;
pub mod io;
pub mod mafunc;
pub mod polytope;
pub mod quadrature;
pub mod rational;
pub mod stability;

pub use error::{Error, Result};
pub use polytope::LabelledPolytope;
pub use quadrature::WeightFunction;
