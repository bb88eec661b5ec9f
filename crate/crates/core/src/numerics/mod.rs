//! Small dense linear-algebra kernels.
//!
//! Everything here is sized for state dimensions up to ~10: eigenvalues come
//! from cyclic Jacobi sweeps on symmetric matrices, singular values from the
//! eigenvalues of the Gram matrix.

mod matrix;

pub use matrix::{dot, norm2, solve_linear, DenseMatrix};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius mass, relative to the matrix norm, at which the
/// Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Symmetry tolerance accepted by the symmetric routines.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Controllability threshold on the smallest singular value of the
/// reachability matrix.
pub const CTRB_TOL: f64 = 1e-8;

/// `a^j` by repeated multiplication; `j = 0` gives the identity.
pub fn matrix_power(a: &DenseMatrix, j: usize) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare("matrix_power"));
    }
    let mut out = DenseMatrix::identity(a.rows());
    for _ in 0..j {
        out = out.matmul(a)?;
    }
    Ok(out)
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, ordered like `values`.
    pub vectors: DenseMatrix,
}

fn check_symmetric(s: &DenseMatrix) -> Result<()> {
    if !s.is_square() {
        return Err(Error::NonSquare("symmetric eigen-decomposition"));
    }
    let scale = s.as_slice().iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut worst = 0.0f64;
    for i in 0..s.rows() {
        for j in i + 1..s.cols() {
            worst = worst.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_TOL * scale {
        return Err(Error::Asymmetric(worst));
    }
    Ok(())
}

/// Cyclic Jacobi eigen-decomposition.
pub fn symmetric_eigen(s: &DenseMatrix) -> Result<SymmetricEigen> {
    check_symmetric(s)?;
    let n = s.rows();
    let mut a = s.clone();
    // Work on the exactly symmetric part.
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let total = a.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn symmetric_eigen_min(s: &DenseMatrix) -> Result<f64> {
    if s.rows() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    Ok(symmetric_eigen(s)?.values[0])
}

/// Extreme singular values `(σ_min, σ_max)` from the eigenvalues of `M Mᵀ`.
///
/// For a wide matrix with full row rank (the reachability matrix) this is the
/// usual pair; for a tall matrix `σ_min` is zero.
pub fn singular_extremes(m: &DenseMatrix) -> Result<(f64, f64)> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let gram = m.matmul(&m.transpose())?;
    let eig = symmetric_eigen(&gram)?;
    let lo = eig.values[0].max(0.0).sqrt();
    let hi = eig.values[eig.values.len() - 1].max(0.0).sqrt();
    Ok((lo, hi))
}

/// Largest singular value.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    // Use the smaller Gram matrix.
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.transpose())?
    } else {
        m.transpose().matmul(m)?
    };
    let eig = symmetric_eigen(&gram)?;
    Ok(eig.values[eig.values.len() - 1].max(0.0).sqrt())
}

/// Reachability matrix `(A^{j-1}B, …, AB, B)`.
pub fn reachability_matrix(a: &DenseMatrix, b: &DenseMatrix, j: usize) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare("reachability matrix"));
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "input matrix rows",
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let mut blocks = Vec::with_capacity(j);
    let mut cur = b.clone();
    for _ in 0..j {
        blocks.push(cur.clone());
        cur = a.matmul(&cur)?;
    }
    let mut out = DenseMatrix::zeros(a.rows(), 0);
    for blk in blocks.iter().rev() {
        out = out.hcat(blk)?;
    }
    Ok(out)
}

/// Schur stability test: the spectral radius is below one iff some power has
/// spectral norm below one. Powers `M^(2^i)` are checked for `i ≤ 12`.
pub fn is_schur_stable(m: &DenseMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NonSquare("Schur stability"));
    }
    if m.rows() == 0 {
        return Ok(true);
    }
    let mut p = m.clone();
    for _ in 0..=12 {
        let nrm = spectral_norm(&p)?;
        if nrm < 1.0 {
            return Ok(true);
        }
        if nrm > 1e100 {
            return Ok(false);
        }
        p = p.matmul(&p)?;
    }
    Ok(false)
}

/// `S^{1/2}` and `S^{-1/2}` of a symmetric positive definite matrix.
pub fn spd_sqrt_pair(s: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let eig = symmetric_eigen(s)?;
    if eig.values[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "matrix square root needs a positive definite argument".into(),
        ));
    }
    let n = s.rows();
    let v = &eig.vectors;
    let build = |f: &dyn Fn(f64) -> f64| {
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| v[(i, k)] * f(eig.values[k]) * v[(j, k)]).sum();
            }
        }
        out
    };
    Ok((build(&|l| l.sqrt()), build(&|l| 1.0 / l.sqrt())))
}
