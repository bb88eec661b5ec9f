//! One-step sets `Q₁^λ(D) = {x ∈ X | ∃u ∈ U: Ax + Bu ∈ λD}`, their iterates,
//! λ-contractiveness checks and membership certificates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::numerics::{matrix_power, reachability_matrix, singular_extremes, DenseMatrix, CTRB_TOL};
use crate::polytope::{is_subset, validate_cset, CSetPolytope, HPolytope};
use crate::tol;

/// `x⁺ = Ax + Bu` with state constraints `X` and input constraints `U`.
#[derive(Debug, Clone, Serialize)]
pub struct SystemModel {
    #[serde(rename = "A")]
    a: DenseMatrix,
    #[serde(rename = "B")]
    b: DenseMatrix,
    #[serde(rename = "X")]
    x: CSetPolytope,
    #[serde(rename = "U")]
    u: CSetPolytope,
    #[serde(skip)]
    sigma_min: f64,
}

impl SystemModel {
    pub fn new(a: DenseMatrix, b: DenseMatrix, x: CSetPolytope, u: CSetPolytope) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NonSquare("system matrix A"));
        }
        let n = a.rows();
        if n == 0 {
            return Err(Error::InvalidParameter("state dimension must be positive".into()));
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                context: "rows of B",
                expected: n,
                found: b.rows(),
            });
        }
        if b.cols() == 0 {
            return Err(Error::InvalidParameter("input dimension must be positive".into()));
        }
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                context: "state constraint set",
                expected: n,
                found: x.dim(),
            });
        }
        if u.dim() != b.cols() {
            return Err(Error::DimensionMismatch {
                context: "input constraint set",
                expected: b.cols(),
                found: u.dim(),
            });
        }
        let phi = reachability_matrix(&a, &b, n)?;
        let (sigma_min, _) = singular_extremes(&phi)?;
        Ok(Self { a, b, x, u, sigma_min })
    }

    /// Validate raw H-representations of `X` and `U` as C-sets first.
    pub fn from_polytopes(a: DenseMatrix, b: DenseMatrix, x: HPolytope, u: HPolytope) -> Result<Self> {
        Self::new(a, b, validate_cset(x)?, validate_cset(u)?)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn x(&self) -> &CSetPolytope {
        &self.x
    }

    pub fn u(&self) -> &CSetPolytope {
        &self.u
    }

    /// Smallest singular value of `Φₙ = (A^{n−1}B, …, B)`.
    pub fn reachability_sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn controllable(&self) -> bool {
        self.sigma_min > CTRB_TOL
    }
}

pub fn check_controllability(sys: &SystemModel) -> bool {
    sys.controllable()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside (0, 1]")));
    }
    Ok(())
}

fn check_state_dim(sys: &SystemModel, what: &'static str, found: usize) -> Result<()> {
    if found != sys.n() {
        return Err(Error::DimensionMismatch {
            context: what,
            expected: sys.n(),
            found,
        });
    }
    Ok(())
}

/// `Q₁^λ(D)`, by projecting `{(x,u) | x ∈ X, u ∈ U, H_D(Ax + Bu) ≤ λ b_D}`.
pub fn one_step_set(sys: &SystemModel, lambda: f64, d: &CSetPolytope) -> Result<CSetPolytope> {
    check_lambda(lambda)?;
    check_state_dim(sys, "target set", d.dim())?;
    let (n, m) = (sys.n(), sys.m());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for (h, b) in sys.x.facets() {
        let mut r = h.to_vec();
        r.resize(n + m, 0.0);
        rows.push(r);
        rhs.push(b);
    }
    for (h, b) in sys.u.facets() {
        let mut r = vec![0.0; n];
        r.extend_from_slice(h);
        rows.push(r);
        rhs.push(b);
    }
    let ha = d.h().matmul(&sys.a)?;
    let hb = d.h().matmul(&sys.b)?;
    for i in 0..d.num_facets() {
        let mut r = ha.row(i).to_vec();
        r.extend_from_slice(hb.row(i));
        if r.iter().all(|v| *v == 0.0) {
            continue;
        }
        rows.push(r);
        rhs.push(lambda * d.b()[i]);
    }
    let lifted = HPolytope::from_rows(&rows, &rhs)?;
    validate_cset(lifted.project(n)?)
}

/// How the first entry of a sequence relates to the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedLabel {
    /// Started from `X`: entries shrink.
    FromX,
    /// Started from a λ-contractive seed: entries grow.
    FromSeedC,
    /// No monotonicity is expected.
    Arbitrary,
}

/// `Q_0^λ(D) = D, Q_1^λ(D), …`
#[derive(Debug, Clone, Serialize)]
pub struct SetSequence {
    pub lambda: f64,
    pub seed: SeedLabel,
    pub entries: Vec<CSetPolytope>,
}

impl SetSequence {
    pub fn new(lambda: f64, seed: SeedLabel, d: CSetPolytope) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            seed,
            entries: vec![d],
        })
    }

    pub fn last(&self) -> &CSetPolytope {
        self.entries.last().expect("a sequence always holds its seed")
    }

    /// Index of the last entry.
    pub fn k(&self) -> usize {
        self.entries.len() - 1
    }

    /// Append `Q₁^λ` of the last entry and check monotonicity.
    pub fn advance(&mut self, sys: &SystemModel) -> Result<&CSetPolytope> {
        let next = one_step_set(sys, self.lambda, self.last())?;
        let j = self.k();
        let ok = match self.seed {
            SeedLabel::FromX => is_subset(&next, self.last())?,
            SeedLabel::FromSeedC => is_subset(self.last(), &next)?,
            SeedLabel::Arbitrary => true,
        };
        if !ok {
            return Err(Error::MonotonicityViolated(j, j + 1));
        }
        self.entries.push(next);
        Ok(self.last())
    }
}

pub fn iterate(sys: &SystemModel, lambda: f64, d: &CSetPolytope, k: usize, seed: SeedLabel) -> Result<SetSequence> {
    check_state_dim(sys, "seed set", d.dim())?;
    let mut seq = SetSequence::new(lambda, seed, d.clone())?;
    for _ in 0..k {
        seq.advance(sys)?;
    }
    Ok(seq)
}

/// The first vertex of `C` that cannot be steered into `λC`, if any.
/// Fails with `SeedOutsideConstraints` when `C ⊄ X`.
pub fn contractiveness_witness(sys: &SystemModel, lambda: f64, c: &CSetPolytope) -> Result<Option<Vec<f64>>> {
    check_lambda(lambda)?;
    check_state_dim(sys, "candidate set", c.dim())?;
    if !is_subset(c, &sys.x)? {
        return Err(Error::SeedOutsideConstraints);
    }
    let hb = c.h().matmul(&sys.b)?;
    let ha = c.h().matmul(&sys.a)?;
    let h = hb.vcat(sys.u.h())?;
    for v in c.vertices()? {
        let hav = ha.mul_vec(&v)?;
        let mut rhs: Vec<f64> = (0..c.num_facets())
            .map(|i| {
                let r = lambda * c.b()[i] - hav[i];
                r + tol::feas() * (1.0 + r.abs())
            })
            .collect();
        rhs.extend_from_slice(sys.u.b());
        let lp = LinearProgram::new(vec![0.0; sys.m()], h.clone(), rhs)?;
        if !solve_lp(&lp)?.is_feasible() {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// `C ⊆ X` and every `x ∈ C` admits `u ∈ U` with `Ax + Bu ∈ λC`.
pub fn is_lambda_contractive(sys: &SystemModel, lambda: f64, c: &CSetPolytope) -> Result<bool> {
    match contractiveness_witness(sys, lambda, c) {
        Ok(w) => Ok(w.is_none()),
        Err(Error::SeedOutsideConstraints) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Inputs `u₀..u_k` and terminal point `γ ∈ C` proving `x ∈ Q_{k+1}^λ(C)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub inputs: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
}

/// Decide `x ∈ Q_{k+1}^λ(C)` with a single LP over `(u₀, …, u_k, γ)`:
/// `Aʲx + Σ_{i<j} A^{j−1−i}Bλⁱuᵢ ∈ λʲX` for `j ≤ k`, `uᵢ ∈ U`, `γ ∈ C`, and
/// `A^{k+1}x + Σ_{i≤k} A^{k−i}Bλⁱuᵢ = λ^{k+1}γ`.
pub fn membership_certificate(
    sys: &SystemModel,
    lambda: f64,
    c: &CSetPolytope,
    x: &[f64],
    k: usize,
) -> Result<Option<MembershipCertificate>> {
    check_lambda(lambda)?;
    check_state_dim(sys, "certificate target set", c.dim())?;
    check_state_dim(sys, "certificate point", x.len())?;
    let (n, m) = (sys.n(), sys.m());
    let nv = (k + 1) * m + n;
    let g0 = (k + 1) * m;

    // powers[j] = Aʲ, blocks[j] = AʲB
    let powers: Vec<DenseMatrix> = (0..=k + 1).map(|j| matrix_power(&sys.a, j)).collect::<Result<_>>()?;
    let blocks: Vec<DenseMatrix> = powers.iter().map(|p| p.matmul(&sys.b)).collect::<Result<_>>()?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();

    for i in 0..=k {
        for (h, b) in sys.u.facets() {
            let mut r = vec![0.0; nv];
            r[i * m..(i + 1) * m].copy_from_slice(h);
            rows.push(r);
            rhs.push(b);
        }
    }
    for (h, b) in c.facets() {
        let mut r = vec![0.0; nv];
        r[g0..].copy_from_slice(h);
        rows.push(r);
        rhs.push(b);
    }

    // Coefficient matrix (n × nv) of Σ_{i<j} A^{j−1−i}Bλⁱuᵢ.
    let input_map = |j: usize| -> DenseMatrix {
        let mut mtx = DenseMatrix::zeros(n, nv);
        for i in 0..j {
            let blk = &blocks[j - 1 - i];
            let s = lambda.powi(i as i32);
            for r in 0..n {
                for t in 0..m {
                    mtx[(r, i * m + t)] = blk[(r, t)] * s;
                }
            }
        }
        mtx
    };

    for j in 0..=k {
        let map = sys.x.h().matmul(&input_map(j))?;
        let ajx = sys.x.h().mul_vec(&powers[j].mul_vec(x)?)?;
        let lj = lambda.powi(j as i32);
        for f in 0..sys.x.num_facets() {
            let r = lj * sys.x.b()[f] - ajx[f];
            rows.push(map.row(f).to_vec());
            rhs.push(r + tol::feas() * (1.0 + r.abs()));
        }
    }

    let mut eq = input_map(k + 1);
    let lk = lambda.powi(k as i32 + 1);
    for r in 0..n {
        eq[(r, g0 + r)] = -lk;
    }
    let target: Vec<f64> = powers[k + 1].mul_vec(x)?.iter().map(|v| -v).collect();
    for r in 0..n {
        let slack = tol::feas() * (1.0 + target[r].abs());
        rows.push(eq.row(r).to_vec());
        rhs.push(target[r] + slack);
        rows.push(eq.row(r).iter().map(|v| -v).collect());
        rhs.push(-target[r] + slack);
    }

    let lp = LinearProgram::new(vec![0.0; nv], DenseMatrix::from_rows(&rows)?, rhs)?;
    Ok(match solve_lp(&lp)? {
        LpOutcome::Optimal { x: z, .. } => Some(MembershipCertificate {
            inputs: (0..=k).map(|i| z[i * m..(i + 1) * m].to_vec()).collect(),
            gamma: z[g0..].to_vec(),
        }),
        _ => None,
    })
}
