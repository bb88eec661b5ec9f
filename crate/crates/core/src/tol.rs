//! Numerical tolerances shared by the LP kernel and the set operations.
//!
//! The feasibility tolerance can be overridden once per process (the CLI's
//! `--tol` flag); the optimality tolerance tracks it and the pivot threshold
//! stays two orders of magnitude below it.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_FEAS_TOL: f64 = 1e-9;

static FEAS_TOL_BITS: AtomicU64 = AtomicU64::new(0);

/// Feasibility tolerance: slack allowed on inequality tests.
pub fn feas() -> f64 {
    match FEAS_TOL_BITS.load(Ordering::Relaxed) {
        0 => DEFAULT_FEAS_TOL,
        bits => f64::from_bits(bits),
    }
}

/// Optimality tolerance on reduced costs.
pub fn opt() -> f64 {
    feas()
}

/// Smallest pivot magnitude the simplex accepts.
pub fn pivot() -> f64 {
    feas() * 1e-2
}

/// Override the feasibility tolerance family. Non-positive or non-finite
/// values restore the default.
pub fn set_feas(value: f64) {
    let bits = if value.is_finite() && value > 0.0 {
        value.to_bits()
    } else {
        0
    };
    FEAS_TOL_BITS.store(bits, Ordering::Relaxed);
}
