use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Reasons an ellipsoidal seed can be rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipsoidCheck {
    #[error("P is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("lambda^2 P - (A+BK)^T P (A+BK) is not positive semidefinite (smallest eigenvalue {0:e})")]
    ContractionInequality(f64),
    #[error("closed loop A+BK is not Schur stable")]
    NotSchurStable,
    #[error("level beta = {beta} exceeds the bound {bound} imposed by constraint row {row} of {set}")]
    LevelTooLarge {
        set: &'static str,
        row: usize,
        beta: f64,
        bound: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{0} requires a square matrix")]
    NonSquare(&'static str),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("facet row {0} is identically zero")]
    ZeroFacet(usize),
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("set is empty")]
    EmptySet,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear program did not terminate within {0} pivots")]
    LpIterationLimit(usize),
    #[error("projection produced {count} facets, above the cap of {cap}")]
    FacetLimit { count: usize, cap: usize },
    #[error("the pair (A, B) is not controllable (sigma_min = {0:e})")]
    NotControllable(f64),
    #[error("seed is not contained in the state constraint set")]
    SeedOutsideConstraints,
    #[error("seed is not lambda-contractive at vertex {vertex:?}")]
    SeedNotContractive { vertex: Vec<f64> },
    #[error("ellipsoidal seed rejected: {0}")]
    InvalidSeed(EllipsoidCheck),
    #[error("contraction rate too weak for a polytopic seed: lambda * sqrt(n) = {0} >= 1")]
    RateTooWeak(f64),
    #[error("sequence monotonicity violated between entries {0} and {1}")]
    MonotonicityViolated(usize, usize),
    #[error("adaptive termination not reached within {0} iterations")]
    BudgetExceeded(usize),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
