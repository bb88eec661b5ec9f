//! Polyhedral λ-contractive sets for constrained linear discrete-time systems.
//!
//! The crate computes one-step sets `Q₁^λ(D) = {x ∈ X | ∃u ∈ U: Ax + Bu ∈ λD}`
//! by Fourier–Motzkin projection, measures convergence of the iterates with a
//! logarithmic radial distance, and plans the number of iterations a priori
//! from a contraction certificate.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod lp;
pub mod metric;
pub mod numerics;
pub mod onestep;
pub mod planner;
pub mod polytope;
pub mod seeds;
pub mod systems;
pub mod tol;

pub use error::{Error, Result};
pub use numerics::DenseMatrix;
pub use polytope::{is_subset, validate_cset, CSetPolytope, HPolytope};
