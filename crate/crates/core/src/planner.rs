//! Iteration bounds, λ selection and the two ways of computing an
//! approximation of the maximal λ-contractive set.

use serde::{Deserialize, Serialize};

use crate::certificate::{compute_certificate, ContractionCertificate};
use crate::error::{Error, Result};
use crate::metric::{inclusion_factor, set_distance};
use crate::onestep::{contractiveness_witness, is_lambda_contractive, SeedLabel, SetSequence, SystemModel};
use crate::polytope::{is_subset, CSetPolytope};

/// Downward nudge applied before integer ceilings.
pub const CEIL_NUDGE: f64 = 1e-12;

fn ceil_nudged(x: f64) -> f64 {
    (x - CEIL_NUDGE).ceil()
}

/// Smallest `k` with `ηᵏ/ⁿ · dCD ≤ δ` in steps of `n`: zero when `dCD ≤ δ`,
/// else `n·⌈(ln δ − ln dCD)/ln η⌉`.
pub fn iteration_bound(eta: f64, delta: f64, d_cd: f64, n: usize) -> Result<usize> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("contraction factor eta = {eta} outside [0, 1)")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
    }
    if !(d_cd >= 0.0 && d_cd.is_finite()) {
        return Err(Error::InvalidParameter(format!("distance {d_cd} must be nonnegative")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("state dimension must be positive".into()));
    }
    if d_cd <= delta {
        return Ok(0);
    }
    if eta == 0.0 {
        return Ok(n);
    }
    let steps = ceil_nudged((delta.ln() - d_cd.ln()) / eta.ln());
    Ok(n * steps.max(1.0) as usize)
}

/// Exact iteration count for the scalar system `x⁺ = 1.1x + u`,
/// `|x| ≤ 10`, `|u| ≤ 1`, seeded with `C = [−2, 2]`.
pub fn exact_k_oracle_1d(lambda: f64, epsilon: f64) -> Result<usize> {
    if !(0.6..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0.6, 1]")));
    }
    if !(epsilon > 0.0 && epsilon <= 4.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, 4]")));
    }
    let num = ((1.1 - lambda) * (8.0 / epsilon - 2.0) + 1.0).ln();
    let den = 1.1f64.ln() - lambda.ln();
    Ok(ceil_nudged(num / den).max(0.0) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PlanPurpose {
    /// `Q_k^λ(X) ⊆ (1+ε)·C_max^λ`.
    EpsilonApprox { epsilon: f64 },
    /// `μ·C_max¹ ⊆ Q_k^λ(C) ⊆ C_max^λ`.
    MuApprox { mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionCase {
    /// `1 + μ ≤ 2λ*ᵏ` already holds; λ* is kept.
    KeepLambdaStar,
    /// λ raised to `exp((ln(1+μ) − ln 2)/k)`.
    Raised,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaSelection {
    pub lambda_star: f64,
    pub mu: f64,
    pub case: SelectionCase,
    /// `2λ*ᵏ`, compared against `1 + μ`.
    pub branch_value: f64,
    /// Bound recomputed with the certificate at the selected λ.
    pub k_recomputed: usize,
}

impl LambdaSelection {
    /// Position of the selected λ in `[λ*, 1]`.
    pub fn conservatism_ratio(&self, lambda: f64) -> f64 {
        (lambda - self.lambda_star) / (1.0 - self.lambda_star)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationPlan {
    pub lambda: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub d_cx: f64,
    pub eta: f64,
    pub k: usize,
    pub n: usize,
    pub purpose: PlanPurpose,
    pub certificate: ContractionCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<LambdaSelection>,
}

fn require_contractive(sys: &SystemModel, lambda: f64, c: &CSetPolytope) -> Result<()> {
    match contractiveness_witness(sys, lambda, c)? {
        Some(vertex) => Err(Error::SeedNotContractive { vertex }),
        None => Ok(()),
    }
}

/// Iterations after which `Q_k^λ(X) ⊆ (1+ε)Q_k^λ(C)`, for a λ-contractive `C`.
pub fn epsilon_plan(sys: &SystemModel, lambda: f64, c: &CSetPolytope, epsilon: f64) -> Result<IterationPlan> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    require_contractive(sys, lambda, c)?;
    let certificate = compute_certificate(sys, lambda)?;
    let delta = epsilon.ln_1p();
    let d_cx = set_distance(c, sys.x())?.distance;
    let k = iteration_bound(certificate.eta, delta, d_cx, sys.n())?;
    Ok(IterationPlan {
        lambda,
        epsilon,
        delta,
        d_cx,
        eta: certificate.eta,
        k,
        n: sys.n(),
        purpose: PlanPurpose::EpsilonApprox { epsilon },
        certificate,
        selection: None,
    })
}

/// Choose `(λ, k)` with `μ·C_max¹ ⊆ Q_k^λ(C) ⊆ C_max^λ`, starting from a
/// λ*-contractive `C`.
pub fn select_lambda(sys: &SystemModel, lambda_star: f64, c: &CSetPolytope, mu: f64) -> Result<IterationPlan> {
    if !(lambda_star > 0.0 && lambda_star < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda_star = {lambda_star} outside (0, 1)")));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0, 1)")));
    }
    let epsilon = (1.0 - mu) / (2.0 * mu);
    let base = epsilon_plan(sys, lambda_star, c, epsilon)?;
    let k = base.k;
    let branch_value = 2.0 * lambda_star.powi(k as i32);
    if 1.0 + mu <= branch_value {
        return Ok(IterationPlan {
            purpose: PlanPurpose::MuApprox { mu },
            selection: Some(LambdaSelection {
                lambda_star,
                mu,
                case: SelectionCase::KeepLambdaStar,
                branch_value,
                k_recomputed: k,
            }),
            ..base
        });
    }
    if k == 0 {
        return Err(Error::Invariant("lambda selection needs k > 0 when 1 + mu > 2".into()));
    }
    let lambda = ((mu.ln_1p() - 2f64.ln()) / k as f64).exp();
    let certificate = compute_certificate(sys, lambda)?;
    let k_recomputed = iteration_bound(certificate.eta, base.delta, base.d_cx, sys.n())?;
    if k_recomputed > k {
        return Err(Error::Invariant(format!(
            "eta at the selected lambda needs {k_recomputed} > {k} iterations"
        )));
    }
    Ok(IterationPlan {
        lambda,
        eta: certificate.eta,
        certificate,
        purpose: PlanPurpose::MuApprox { mu },
        selection: Some(LambdaSelection {
            lambda_star,
            mu,
            case: SelectionCase::Raised,
            branch_value,
            k_recomputed,
        }),
        ..base
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Run exactly `plan.k` iterations.
    AprioriBound,
    /// Stop at the first `j` with `Q_j^λ(X) ⊆ (1+ε)Q_j^λ(C)`.
    AdaptiveInclusion,
}

/// Inclusion of `Q_j^λ(X)` in `(1+ε)Q_j^λ(C)` at one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InclusionRecord {
    pub j: usize,
    /// Smallest μ with `Q_j(X) ⊆ μ·Q_j(C)`.
    pub factor: f64,
    /// `1 + ε − factor`; nonnegative when the inclusion holds.
    pub slack: f64,
    pub holds: bool,
    pub facets_x: usize,
    pub facets_c: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproximationResult {
    pub terminal: CSetPolytope,
    pub k_star: usize,
    pub strategy: Strategy,
    pub lambda: f64,
    pub contractive: bool,
    pub relations: Vec<InclusionRecord>,
    #[serde(skip)]
    pub from_x: SetSequence,
    #[serde(skip)]
    pub from_c: SetSequence,
}

fn inclusion_record(j: usize, qx: &CSetPolytope, qc: &CSetPolytope, epsilon: f64) -> Result<InclusionRecord> {
    let factor = inclusion_factor(qc, qx)?;
    let scaled = qc.scale(1.0 + epsilon)?;
    Ok(InclusionRecord {
        j,
        factor,
        slack: 1.0 + epsilon - factor,
        holds: is_subset(qx, &scaled)?,
        facets_x: qx.num_facets(),
        facets_c: qc.num_facets(),
    })
}

/// Run both sequences `Q_j^λ(X)` and `Q_j^λ(C)` under `plan` and return the
/// terminal set selected by `strategy`.
pub fn approximate_cmax1(
    sys: &SystemModel,
    plan: &IterationPlan,
    c: &CSetPolytope,
    strategy: Strategy,
) -> Result<ApproximationResult> {
    let lambda = plan.lambda;
    let mut from_x = SetSequence::new(lambda, SeedLabel::FromX, sys.x().clone())?;
    let mut from_c = SetSequence::new(lambda, SeedLabel::FromSeedC, c.clone())?;
    let mut relations = vec![inclusion_record(0, from_x.last(), from_c.last(), plan.epsilon)?];
    let mut k_star = None;
    if strategy == Strategy::AdaptiveInclusion && relations[0].holds {
        k_star = Some(0);
    }
    while k_star.is_none() && from_c.k() < plan.k {
        from_x.advance(sys)?;
        from_c.advance(sys)?;
        let rec = inclusion_record(from_c.k(), from_x.last(), from_c.last(), plan.epsilon)?;
        let hit = rec.holds;
        relations.push(rec);
        if strategy == Strategy::AdaptiveInclusion && hit {
            k_star = Some(from_c.k());
        }
    }
    let k_star = match (strategy, k_star) {
        (Strategy::AprioriBound, _) => plan.k,
        (Strategy::AdaptiveInclusion, Some(k)) => k,
        (Strategy::AdaptiveInclusion, None) => return Err(Error::BudgetExceeded(plan.k)),
    };
    let terminal = from_c.last().clone();
    let contractive = is_lambda_contractive(sys, lambda, &terminal)?;
    if !contractive {
        return Err(Error::Invariant(format!("terminal set after {k_star} iterations is not contractive")));
    }
    Ok(ApproximationResult {
        terminal,
        k_star,
        strategy,
        lambda,
        contractive,
        relations,
        from_x,
        from_c,
    })
}
