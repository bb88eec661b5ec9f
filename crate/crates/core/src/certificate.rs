//! A-priori contraction factor `η` of the n-step one-step map.
//!
//! With `B(r_x_lo) ⊆ X ⊆ B(r_x_hi)`, `B(r_u_lo) ⊆ U`,
//! `α = max{1, max_{j≤n} ‖Aʲ‖₂}` and the extreme singular values of
//! `Φₙ = (A^{n−1}B, …, B)`:
//!
//! ```text
//! ρ̂ = (λ^{n−1}/α) · min{ r_x_lo / (1 + σ_max/σ_min), r_u_lo · σ_min }
//! η = 1 − ρ̂ / r_x_hi
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{matrix_power, reachability_matrix, singular_extremes, spectral_norm};
use crate::onestep::SystemModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub lambda: f64,
    pub r_x_lo: f64,
    pub r_x_hi: f64,
    pub r_u_lo: f64,
    pub alpha: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rho_hat: f64,
    pub eta: f64,
}

/// Radii bounding the constraint sets: `B(r_x_lo) ⊆ X ⊆ B(r_x_hi)` and
/// `B(r_u_lo) ⊆ U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintRadii {
    pub r_x_lo: f64,
    pub r_x_hi: f64,
    pub r_u_lo: f64,
}

impl ConstraintRadii {
    pub fn of(sys: &SystemModel) -> Result<Self> {
        Ok(Self {
            r_x_lo: sys.x().inradius_origin(),
            r_x_hi: sys.x().outer_radius()?,
            r_u_lo: sys.u().inradius_origin(),
        })
    }
}

pub fn compute_certificate(sys: &SystemModel, lambda: f64) -> Result<ContractionCertificate> {
    certificate_with_radii(sys, lambda, ConstraintRadii::of(sys)?)
}

/// Same as [`compute_certificate`] with caller-supplied radii. Any radii
/// satisfying the ball inclusions give a valid, possibly larger, `η`.
pub fn certificate_with_radii(sys: &SystemModel, lambda: f64, radii: ConstraintRadii) -> Result<ContractionCertificate> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    let ConstraintRadii { r_x_lo, r_x_hi, r_u_lo } = radii;
    if !(r_x_lo > 0.0 && r_u_lo > 0.0 && r_x_lo <= r_x_hi && r_x_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "constraint radii must satisfy 0 < r_x_lo <= r_x_hi and r_u_lo > 0, got {radii:?}"
        )));
    }
    let n = sys.n();
    let phi = reachability_matrix(sys.a(), sys.b(), n)?;
    let (sigma_min, sigma_max) = singular_extremes(&phi)?;
    if !sys.controllable() {
        return Err(Error::NotControllable(sigma_min));
    }
    let mut alpha = 1.0f64;
    for j in 1..=n {
        alpha = alpha.max(spectral_norm(&matrix_power(sys.a(), j)?)?);
    }
    let rho_hat = lambda.powi(n as i32 - 1) / alpha
        * f64::min(r_x_lo / (1.0 + sigma_max / sigma_min), r_u_lo * sigma_min);
    let eta = 1.0 - rho_hat / r_x_hi;
    let cert = ContractionCertificate {
        lambda,
        r_x_lo,
        r_x_hi,
        r_u_lo,
        alpha,
        sigma_min,
        sigma_max,
        rho_hat,
        eta,
    };
    if !(rho_hat > 0.0 && rho_hat <= r_x_lo / 2.0 * (1.0 + 1e-12) && (0.5..1.0).contains(&eta)) {
        return Err(Error::Invariant(format!("certificate out of range: {cert:?}")));
    }
    Ok(cert)
}
