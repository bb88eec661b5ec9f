//! H-representation polytopes `{x | H x ≤ b}` and the C-set wrapper.
//!
//! Every operation that needs an optimum (support values, containment,
//! redundancy, feasibility) goes through [`crate::lp::solve_lp`].

mod project;
mod vertices;

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::numerics::{dot, norm2, DenseMatrix};
use crate::tol;

pub use project::max_facets;
pub use vertices::MAX_VERTEX_DIM;

/// Two points closer than this (max-norm) are the same vertex.
pub const VERTEX_DEDUP_TOL: f64 = 1e-8;
/// Unit-norm tolerance for directions passed to [`CSetPolytope::radial`].
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HRep", into = "HRep")]
pub struct HPolytope {
    h: DenseMatrix,
    b: Vec<f64>,
    dim: usize,
}

/// Serialized form: `{"H": [[...], ...], "b": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct HRep {
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl TryFrom<HRep> for HPolytope {
    type Error = Error;

    fn try_from(rep: HRep) -> Result<Self> {
        if rep.h.is_empty() {
            return Err(Error::InvalidParameter(
                "an H-representation needs at least one facet".into(),
            ));
        }
        HPolytope::new(DenseMatrix::from_rows(&rep.h)?, rep.b)
    }
}

impl From<HPolytope> for HRep {
    fn from(p: HPolytope) -> Self {
        HRep {
            h: p.h.to_rows(),
            b: p.b,
        }
    }
}

impl std::fmt::Debug for HPolytope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HPolytope")
            .field("H", &self.h)
            .field("b", &self.b)
            .finish()
    }
}

impl HPolytope {
    /// `{x | h x ≤ b}`. Rows of `h` must be nonzero.
    pub fn new(h: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        let dim = h.cols();
        Self::with_dim(h, b, dim)
    }

    fn with_dim(h: DenseMatrix, b: Vec<f64>, dim: usize) -> Result<Self> {
        if h.rows() != b.len() {
            return Err(Error::DimensionMismatch {
                context: "facet offsets",
                expected: h.rows(),
                found: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("facet offsets"));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("polytope dimension must be positive".into()));
        }
        if let Some(i) = (0..h.rows()).find(|&i| h.row(i).iter().all(|v| *v == 0.0)) {
            return Err(Error::ZeroFacet(i));
        }
        Ok(Self { h, b, dim })
    }

    /// Build from facet rows and offsets.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], b: &[f64]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?, b.to_vec())
    }

    /// The whole space `ℝ^dim` (no facets).
    pub fn whole_space(dim: usize) -> Result<Self> {
        Self::with_dim(DenseMatrix::zeros(0, dim), Vec::new(), dim)
    }

    /// Axis-aligned box `lo ≤ x ≤ hi`.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                context: "box bounds",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        let n = lo.len();
        let mut h = DenseMatrix::zeros(2 * n, n);
        let mut b = Vec::with_capacity(2 * n);
        for i in 0..n {
            h[(2 * i, i)] = 1.0;
            h[(2 * i + 1, i)] = -1.0;
            b.push(hi[i]);
            b.push(-lo[i]);
        }
        Self::new(h, b)
    }

    /// `[-r₁, r₁] × … × [-rₙ, rₙ]`.
    pub fn symmetric_box(half_widths: &[f64]) -> Result<Self> {
        let lo: Vec<f64> = half_widths.iter().map(|r| -r).collect();
        Self::axis_box(&lo, half_widths)
    }

    /// `[-r, r]ⁿ`.
    pub fn hypercube(n: usize, r: f64) -> Result<Self> {
        Self::symmetric_box(&vec![r; n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.b.len()
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn facet(&self, i: usize) -> (&[f64], f64) {
        (self.h.row(i), self.b[i])
    }

    pub fn facets(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        (0..self.num_facets()).map(move |i| self.facet(i))
    }

    /// Largest constraint violation `max_i (hᵢ·x − bᵢ)`; nonpositive inside.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.facets()
            .map(|(h, b)| dot(h, x) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.num_facets() == 0 || self.max_violation(x) <= tol
    }

    fn check_dim(&self, what: &'static str, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                context: what,
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    fn lp(&self, objective: Vec<f64>) -> Result<LpOutcome> {
        let p = LinearProgram::new(objective, self.h.clone(), self.b.clone())?;
        solve_lp(&p)
    }

    /// `max aᵀx` over the polytope.
    pub fn support(&self, a: &[f64]) -> Result<f64> {
        self.check_dim("support direction", a.len())?;
        match self.lp(a.to_vec())? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::EmptySet),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    /// Support value together with a maximizer.
    pub fn support_point(&self, a: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim("support direction", a.len())?;
        match self.lp(a.to_vec())? {
            LpOutcome::Optimal { value, x } => Ok((value, x)),
            LpOutcome::Infeasible => Err(Error::EmptySet),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(matches!(self.lp(vec![0.0; self.dim])?, LpOutcome::Infeasible))
    }

    /// Bounded iff the support in every `±eᵢ` direction is finite.
    pub fn is_bounded(&self) -> Result<bool> {
        for i in 0..self.dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; self.dim];
                e[i] = s;
                match self.support(&e) {
                    Ok(_) => {}
                    Err(Error::Unbounded) => return Ok(false),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(true)
    }

    /// Radius of the largest ball inside the polytope (negative when empty).
    pub fn chebyshev_radius(&self) -> Result<f64> {
        let d = self.dim;
        let mut h = DenseMatrix::zeros(self.num_facets() + 1, d + 1);
        let mut b = self.b.clone();
        for i in 0..self.num_facets() {
            let row = self.h.row(i);
            h.row_mut(i)[..d].copy_from_slice(row);
            h[(i, d)] = norm2(row);
        }
        // Cap the radius so unbounded polytopes still give a finite answer.
        h[(self.num_facets(), d)] = 1.0;
        b.push(1e12);
        let mut obj = vec![0.0; d + 1];
        obj[d] = 1.0;
        let p = LinearProgram::new(obj, h, b)?;
        match solve_lp(&p)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Ok(f64::NEG_INFINITY),
            LpOutcome::Unbounded => Err(Error::Invariant("Chebyshev LP unbounded".into())),
        }
    }

    /// `μ·P = {μx | x ∈ P}`.
    pub fn scale(&self, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {mu}")));
        }
        Ok(Self {
            h: self.h.clone(),
            b: self.b.iter().map(|v| v * mu).collect(),
            dim: self.dim,
        })
    }

    /// Concatenated facet systems.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        other.check_dim("intersection operand", other.dim)?;
        self.check_dim("intersection operand", other.dim)?;
        let h = self.h.vcat(&other.h)?;
        let mut b = self.b.clone();
        b.extend_from_slice(&other.b);
        Self::with_dim(h, b, self.dim)
    }

    /// Rows scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Self {
        let mut h = self.h.clone();
        let mut b = self.b.clone();
        for i in 0..self.num_facets() {
            let nrm = norm2(self.h.row(i));
            for v in h.row_mut(i) {
                *v /= nrm;
            }
            b[i] /= nrm;
        }
        Self { h, b, dim: self.dim }
    }

    /// Drop every facet implied by the others. The result describes the same
    /// set with unit-norm rows.
    pub fn remove_redundancy(&self) -> Result<Self> {
        if self.is_empty()? {
            return Err(Error::EmptySet);
        }
        let p = self.normalized();
        let d = self.dim;

        // Collapse parallel duplicates, keeping the tightest offset.
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut offs: Vec<f64> = Vec::new();
        for (h, b) in p.facets() {
            match rows.iter().position(|r| {
                r.iter().zip(h).all(|(x, y)| (x - y).abs() <= 1e-12)
            }) {
                Some(k) => offs[k] = offs[k].min(b),
                None => {
                    rows.push(h.to_vec());
                    offs.push(b);
                }
            }
        }

        let mut keep = vec![true; rows.len()];
        for i in 0..rows.len() {
            let mut h = DenseMatrix::zeros(0, d);
            let mut b = Vec::new();
            for j in (0..rows.len()).filter(|&j| keep[j] && j != i) {
                h = h.vcat(&DenseMatrix::from_rows(&[&rows[j]])?)?;
                b.push(offs[j]);
            }
            // The relaxed copy of row i keeps the LP bounded in its own direction.
            h = h.vcat(&DenseMatrix::from_rows(&[&rows[i]])?)?;
            b.push(offs[i] + 1.0);
            let lp = LinearProgram::new(rows[i].clone(), h, b)?;
            let redundant = match solve_lp(&lp)? {
                LpOutcome::Optimal { value, .. } => value <= offs[i] + tol::feas() * (1.0 + offs[i].abs()),
                LpOutcome::Unbounded => false,
                LpOutcome::Infeasible => return Err(Error::EmptySet),
            };
            if redundant {
                keep[i] = false;
            }
        }
        let kept: Vec<&Vec<f64>> = rows.iter().zip(&keep).filter(|(_, k)| **k).map(|(r, _)| r).collect();
        let b: Vec<f64> = offs.iter().zip(&keep).filter(|(_, k)| **k).map(|(o, _)| *o).collect();
        let h = if kept.is_empty() {
            DenseMatrix::zeros(0, d)
        } else {
            DenseMatrix::from_rows(&kept)?
        };
        Self::with_dim(h, b, d)
    }

    /// Shadow on the first `keep` coordinates, `{x | ∃y: (x, y) ∈ P}`.
    pub fn project(&self, keep: usize) -> Result<Self> {
        project::fourier_motzkin(self, keep)
    }

    /// All vertices of a bounded polytope of dimension at most four.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        vertices::enumerate(self)
    }
}

/// `inner ⊆ outer`, tested facet by facet of `outer` with support values of
/// `inner`.
pub fn is_subset(inner: &HPolytope, outer: &HPolytope) -> Result<bool> {
    if inner.dim() != outer.dim() {
        return Err(Error::DimensionMismatch {
            context: "subset test",
            expected: outer.dim(),
            found: inner.dim(),
        });
    }
    if inner.is_empty()? {
        return Err(Error::EmptySet);
    }
    Ok(subset_slack(inner, outer)? >= 0.0)
}

/// Smallest `bᵢ + tolᵢ − support(inner, hᵢ)` over facets of `outer`.
/// Nonnegative iff `inner ⊆ outer` within tolerance; `-∞` when `inner` is
/// unbounded in some facet direction.
pub fn subset_slack(inner: &HPolytope, outer: &HPolytope) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for (h, b) in outer.facets() {
        match inner.support(h) {
            Ok(s) => worst = worst.min(b + tol::feas() * (1.0 + b.abs()) - s),
            Err(Error::Unbounded) => return Ok(f64::NEG_INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

/// A polytope certified to be a C-set: bounded, with the origin in its
/// interior (all offsets strictly positive).
#[derive(Clone, PartialEq, Serialize)]
#[serde(into = "HPolytope")]
pub struct CSetPolytope {
    base: HPolytope,
}

impl From<CSetPolytope> for HPolytope {
    fn from(c: CSetPolytope) -> Self {
        c.base
    }
}

impl std::fmt::Debug for CSetPolytope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CSet{:?}", self.base)
    }
}

impl Deref for CSetPolytope {
    type Target = HPolytope;

    fn deref(&self) -> &HPolytope {
        &self.base
    }
}

/// Certify that `p` is a C-set.
pub fn validate_cset(p: HPolytope) -> Result<CSetPolytope> {
    if p.num_facets() == 0 {
        return Err(Error::Unbounded);
    }
    if p.is_empty()? {
        return Err(Error::EmptyInterior);
    }
    if !p.is_bounded()? {
        return Err(Error::Unbounded);
    }
    if p.b().iter().any(|&bi| bi <= 0.0) {
        let r = p.chebyshev_radius()?;
        return Err(if r <= tol::feas() {
            Error::EmptyInterior
        } else {
            Error::OriginNotInterior
        });
    }
    Ok(CSetPolytope { base: p })
}

impl CSetPolytope {
    pub fn new(p: HPolytope) -> Result<Self> {
        validate_cset(p)
    }

    /// Symmetric box shortcut, validated.
    pub fn symmetric_box(half_widths: &[f64]) -> Result<Self> {
        validate_cset(HPolytope::symmetric_box(half_widths)?)
    }

    pub fn hypercube(n: usize, r: f64) -> Result<Self> {
        validate_cset(HPolytope::hypercube(n, r)?)
    }

    pub fn as_polytope(&self) -> &HPolytope {
        &self.base
    }

    pub fn into_polytope(self) -> HPolytope {
        self.base
    }

    /// Positive scaling keeps the C-set property.
    pub fn scale(&self, mu: f64) -> Result<Self> {
        Ok(Self {
            base: self.base.scale(mu)?,
        })
    }

    /// Radial function `sup{μ > 0 | μξ ∈ C}` for a unit direction ξ.
    pub fn radial(&self, xi: &[f64]) -> Result<f64> {
        self.check_dim("radial direction", xi.len())?;
        let nrm = norm2(xi);
        if (nrm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!("direction has norm {nrm}, expected 1")));
        }
        let r = self
            .facets()
            .filter_map(|(h, b)| {
                let hx = dot(h, xi);
                (hx > 0.0).then(|| b / hx)
            })
            .fold(f64::INFINITY, f64::min);
        if !r.is_finite() {
            return Err(Error::Invariant("C-set unbounded along a direction".into()));
        }
        Ok(r)
    }

    /// Radius of the largest origin-centred ball inside the set.
    pub fn inradius_origin(&self) -> f64 {
        self.facets()
            .map(|(h, b)| b / norm2(h))
            .fold(f64::INFINITY, f64::min)
    }

    /// A radius of an origin-centred ball containing the set: the largest
    /// vertex norm in dimension ≤ 4, otherwise the norm of the bounding box
    /// corner, which may overestimate.
    pub fn outer_radius(&self) -> Result<f64> {
        if self.dim() <= MAX_VERTEX_DIM {
            let v = self.vertices()?;
            return Ok(v.iter().map(|p| norm2(p)).fold(0.0, f64::max));
        }
        self.outer_radius_box_bound()
    }

    /// `√(Σᵢ max(support(eᵢ), support(−eᵢ))²)`, valid in any dimension.
    pub fn outer_radius_box_bound(&self) -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..self.dim() {
            let mut e = vec![0.0; self.dim()];
            e[i] = 1.0;
            let hi = self.support(&e)?;
            e[i] = -1.0;
            let lo = self.support(&e)?;
            let m = hi.max(lo);
            acc += m * m;
        }
        Ok(acc.sqrt())
    }
}
