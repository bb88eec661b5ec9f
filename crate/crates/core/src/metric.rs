//! Logarithmic radial distance between C-sets.
//!
//! `d(C, D) = sup_ξ |ln ρ(ξ, C) − ln ρ(ξ, D)|`, evaluated through the two
//! one-sided inclusion factors `min{μ | D ⊆ μC}` and `min{μ | C ⊆ μD}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{is_subset, CSetPolytope};

/// Inclusion factors within `1 + EQUAL_TOL` of one mean the sets coincide.
pub const EQUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub distance: f64,
    /// Smallest μ with `D ⊆ μC`.
    pub mu_out: f64,
    /// Smallest μ with `C ⊆ μD`.
    pub mu_in: f64,
}

impl DistanceResult {
    pub fn sets_equal(&self) -> bool {
        self.mu_out <= 1.0 + EQUAL_TOL && self.mu_in <= 1.0 + EQUAL_TOL
    }
}

fn check_dims(c: &CSetPolytope, d: &CSetPolytope) -> Result<()> {
    if c.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            context: "set distance",
            expected: c.dim(),
            found: d.dim(),
        });
    }
    Ok(())
}

/// Smallest `μ > 0` with `D ⊆ μC`: the largest ratio `support(D, hᵢ)/bᵢ` over
/// facets of `C`.
pub fn inclusion_factor(c: &CSetPolytope, d: &CSetPolytope) -> Result<f64> {
    check_dims(c, d)?;
    let mut mu = 0.0f64;
    for (h, b) in c.facets() {
        mu = mu.max(d.support(h)? / b);
    }
    Ok(mu)
}

pub fn set_distance(c: &CSetPolytope, d: &CSetPolytope) -> Result<DistanceResult> {
    let mu_out = inclusion_factor(c, d)?;
    let mu_in = inclusion_factor(d, c)?;
    Ok(DistanceResult {
        distance: mu_out.max(mu_in).ln().max(0.0),
        mu_out,
        mu_in,
    })
}

/// `D ⊆ exp(δ)·C`, for nested `C ⊆ D`.
pub fn check_inclusion_equivalence(c: &CSetPolytope, d: &CSetPolytope, delta: f64) -> Result<bool> {
    check_dims(c, d)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("distance threshold {delta} must be nonnegative")));
    }
    if !is_subset(c, d)? {
        return Err(Error::InvalidParameter("inclusion test needs C ⊆ D".into()));
    }
    let scaled = c.scale(delta.exp())?;
    is_subset(d, &scaled)
}
