//! Reference systems used by the reproduction tasks and the test suites.

use crate::error::Result;
use crate::numerics::DenseMatrix;
use crate::onestep::SystemModel;
use crate::polytope::CSetPolytope;

/// `x⁺ = 1.1·x + u` in `ℝⁿ` with `X = [−10, 10]ⁿ`, `U = [−1, 1]ⁿ`.
pub fn unstable_box(n: usize) -> Result<SystemModel> {
    SystemModel::new(
        DenseMatrix::identity(n).scaled(1.1),
        DenseMatrix::identity(n),
        CSetPolytope::hypercube(n, 10.0)?,
        CSetPolytope::hypercube(n, 1.0)?,
    )
}

/// Quarter-turn rotation driven through the second coordinate, with
/// `X = [−5, 5]²` and `U = [−1, 1]`.
pub fn rotation() -> Result<SystemModel> {
    SystemModel::new(
        DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])?,
        DenseMatrix::from_rows(&[[0.0], [1.0]])?,
        CSetPolytope::hypercube(2, 5.0)?,
        CSetPolytope::hypercube(1, 1.0)?,
    )
}

/// `x⁺ = 0.8·x` with an input that has no effect; `X = [−5, 5]`, `U = [−1, 1]`.
pub fn stabilizable() -> Result<SystemModel> {
    SystemModel::new(
        DenseMatrix::from_rows(&[[0.8]])?,
        DenseMatrix::from_rows(&[[0.0]])?,
        CSetPolytope::hypercube(1, 5.0)?,
        CSetPolytope::hypercube(1, 1.0)?,
    )
}

/// Half-width of `Q_k^λ(X)` for [`unstable_box`] with `n = 1`:
/// `10(λ/1.1)ᵏ + (1 − (λ/1.1)ᵏ)/(1.1 − λ)`.
pub fn unstable_x_radius(lambda: f64, k: usize) -> f64 {
    let r = (lambda / 1.1).powi(k as i32);
    10.0 * r + (1.0 - r) / (1.1 - lambda)
}

/// Half-width of `Q_k^λ([−2, 2])` for [`unstable_box`] with `n = 1`:
/// `2(λ/1.1)ᵏ + (1 − (λ/1.1)ᵏ)/(1.1 − λ)`.
pub fn unstable_c_radius(lambda: f64, k: usize) -> f64 {
    let r = (lambda / 1.1).powi(k as i32);
    2.0 * r + (1.0 - r) / (1.1 - lambda)
}

/// `ln(λ^{2j}/Σ_{i≤j} λ^{2i} + 1)`: distance between the rotation iterates of
/// `[−1, 1]²` and `[−2, 2] × [−1, 1]` at steps `2j` and `2j + 1`.
pub fn rotation_distance(lambda: f64, j: usize) -> f64 {
    let l2 = lambda * lambda;
    let sum: f64 = (0..=j).map(|i| l2.powi(i as i32)).sum();
    (l2.powi(j as i32) / sum + 1.0).ln()
}

/// Box half-widths of `Q_k^λ(T)` for the rotation system and
/// `T = [−τ₁, τ₁] × [−τ₂, τ₂]`, from `(τ₁, τ₂) ↦ (λτ₂ + 1, λτ₁)`.
pub fn rotation_box(lambda: f64, tau: [f64; 2], k: usize) -> [f64; 2] {
    (0..k).fold(tau, |t, _| [lambda * t[1] + 1.0, lambda * t[0]])
}
