//! Initial λ-contractive sets: ellipsoids `{x | xᵀPx ≤ β}` certified under a
//! linear feedback `u = Kx`, their inscribed cross-polytopes, and user seeds.

use serde::{Deserialize, Serialize};

use crate::error::{EllipsoidCheck, Error, Result};
use crate::numerics::{is_schur_stable, solve_linear, spd_sqrt_pair, symmetric_eigen_min, DenseMatrix, SYMMETRY_TOL};
use crate::onestep::{contractiveness_witness, SystemModel};
use crate::polytope::{validate_cset, CSetPolytope, HPolytope};

/// Slack on the semidefinite test, relative to the size of `λ²P`.
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidSeed {
    #[serde(rename = "K")]
    pub k: DenseMatrix,
    #[serde(rename = "P")]
    pub p: DenseMatrix,
    pub beta: f64,
    pub lambda: f64,
}

fn symmetrized(s: &DenseMatrix) -> DenseMatrix {
    s.add(&s.transpose()).expect("square").scaled(0.5)
}

fn inverse(p: &DenseMatrix) -> Result<DenseMatrix> {
    let n = p.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve_linear(p, &e, 1e-14)
            .ok_or_else(|| Error::InvalidSeed(EllipsoidCheck::NotPositiveDefinite(0.0)))?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// `A + BK`.
pub fn closed_loop(sys: &SystemModel, k: &DenseMatrix) -> Result<DenseMatrix> {
    if k.rows() != sys.m() || k.cols() != sys.n() {
        return Err(Error::DimensionMismatch {
            context: "feedback gain K",
            expected: sys.m() * sys.n(),
            found: k.rows() * k.cols(),
        });
    }
    sys.a().add(&sys.b().matmul(k)?)
}

pub fn validate_ellipsoid_seed(sys: &SystemModel, seed: &EllipsoidSeed) -> Result<EllipsoidSeed> {
    let n = sys.n();
    let m = closed_loop(sys, &seed.k)?;
    if seed.p.rows() != n || seed.p.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "ellipsoid matrix P",
            expected: n * n,
            found: seed.p.rows() * seed.p.cols(),
        });
    }
    let asym = seed.p.max_abs_diff(&seed.p.transpose());
    if asym > SYMMETRY_TOL {
        return Err(Error::Asymmetric(asym));
    }
    if !(seed.beta > 0.0 && seed.beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("ellipsoid level beta = {} must be positive", seed.beta)));
    }
    if !(seed.lambda > 0.0 && seed.lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {} outside (0, 1]", seed.lambda)));
    }

    let pmin = symmetric_eigen_min(&seed.p)?;
    if pmin <= 0.0 {
        return Err(Error::InvalidSeed(EllipsoidCheck::NotPositiveDefinite(pmin)));
    }

    let lhs = seed.p.scaled(seed.lambda * seed.lambda);
    let mpm = m.transpose().matmul(&seed.p)?.matmul(&m)?;
    let gap = symmetric_eigen_min(&symmetrized(&lhs.sub(&mpm)?))?;
    if gap < -PSD_TOL * (1.0 + lhs.frobenius_norm()) {
        return Err(Error::InvalidSeed(EllipsoidCheck::ContractionInequality(gap)));
    }

    if !is_schur_stable(&m)? {
        return Err(Error::InvalidSeed(EllipsoidCheck::NotSchurStable));
    }

    let pinv = inverse(&seed.p)?;
    let level_bound = |a: &[f64], b: f64| -> Result<Option<f64>> {
        let pa = pinv.mul_vec(a)?;
        let q: f64 = a.iter().zip(&pa).map(|(x, y)| x * y).sum();
        Ok((q > 0.0).then(|| b * b / q))
    };
    for (row, (a, b)) in sys.x().facets().enumerate() {
        if let Some(bound) = level_bound(a, b)? {
            if seed.beta > bound * (1.0 + 1e-12) {
                return Err(Error::InvalidSeed(EllipsoidCheck::LevelTooLarge {
                    set: "X",
                    row,
                    beta: seed.beta,
                    bound,
                }));
            }
        }
    }
    let kt = seed.k.transpose();
    for (row, (c, d)) in sys.u().facets().enumerate() {
        let a = kt.mul_vec(c)?;
        if let Some(bound) = level_bound(&a, d)? {
            if seed.beta > bound * (1.0 + 1e-12) {
                return Err(Error::InvalidSeed(EllipsoidCheck::LevelTooLarge {
                    set: "U",
                    row,
                    beta: seed.beta,
                    bound,
                }));
            }
        }
    }
    Ok(seed.clone())
}

/// Cross-polytope inscribed in the seed ellipsoid, touching it at
/// `±√β·P^{−1/2}eᵢ`, together with the rate it is contractive for.
///
/// In coordinates `y = P^{1/2}x` the ellipsoid is the ball of radius `√β` and
/// the cross-polytope `‖y‖₁ ≤ √β` sits between the balls of radii `√β/√n`
/// and `√β`. The closed loop maps it into `λ·E ⊆ λ√n·C`.
pub fn polytopic_inner_seed(sys: &SystemModel, seed: &EllipsoidSeed) -> Result<(CSetPolytope, f64)> {
    let seed = validate_ellipsoid_seed(sys, seed)?;
    let n = sys.n();
    let lambda_eff = seed.lambda * (n as f64).sqrt();
    if lambda_eff >= 1.0 {
        return Err(Error::RateTooWeak(lambda_eff));
    }
    let (half, _) = spd_sqrt_pair(&seed.p)?;
    let r = seed.beta.sqrt();
    let mut rows = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        let s: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        rows.push(half.transpose().mul_vec(&s)?);
    }
    let c = validate_cset(HPolytope::from_rows(&rows, &vec![r; rows.len()])?)?;
    if let Some(v) = contractiveness_witness(sys, lambda_eff, &c)? {
        return Err(Error::Invariant(format!(
            "inscribed cross-polytope fails contractiveness at {v:?}"
        )));
    }
    Ok((c, lambda_eff))
}

/// Accept `C` if it is a λ-contractive subset of `X`.
pub fn accept_user_seed(sys: &SystemModel, lambda: f64, c: &CSetPolytope) -> Result<CSetPolytope> {
    match contractiveness_witness(sys, lambda, c)? {
        Some(vertex) => Err(Error::SeedNotContractive { vertex }),
        None => Ok(c.clone()),
    }
}

/// `P` solving `MᵀPM − P = −I` for `M = (A + BK)/λ`.
pub fn lyapunov_for_gain(sys: &SystemModel, k: &DenseMatrix, lambda: f64) -> Result<DenseMatrix> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    let m = closed_loop(sys, k)?.scaled(1.0 / lambda);
    let n = sys.n();
    let nn = n * n;
    // Row (i,j), column (k,l): coefficient of P_kl in (MᵀPM − P)_ij.
    let mut lin = DenseMatrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    lin[(i * n + j, k * n + l)] = m[(k, i)] * m[(l, j)];
                }
            }
            lin[(i * n + j, i * n + j)] -= 1.0;
        }
    }
    let rhs: Vec<f64> = (0..nn).map(|idx| if idx / n == idx % n { -1.0 } else { 0.0 }).collect();
    let vec_p = solve_linear(&lin, &rhs, 1e-14)
        .ok_or_else(|| Error::InvalidParameter("scaled Lyapunov equation is singular".into()))?;
    Ok(symmetrized(&DenseMatrix::new(n, n, vec_p)?))
}
