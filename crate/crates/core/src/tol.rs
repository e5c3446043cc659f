//! Numerical tolerances shared across the crate.

/// Unit roundoff for `f64`.
pub const EPS: f64 = f64::EPSILON;

/// Relative window inside which two column norms are treated as tied during
/// pivoting; the smallest original index wins.
pub const PIVOT_TIE: f64 = 1e-13;

/// Relative window inside which downdated column norms are re-evaluated
/// exactly before committing to a pivot.
pub const PIVOT_RECHECK: f64 = 1e-6;

/// Slack factor (times `EPS`) allowed in the pivoted-QR dominance check.
pub const DOMINANCE_SLACK: f64 = 8.0;

/// One-sided Jacobi stops when every pair has |cos| below this.
pub const JACOBI_COSINE: f64 = 1e-14;

/// Cap on the number of Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 30;

/// Orthonormality tolerance required of Galerkin bases.
pub const GALERKIN_ORTHO: f64 = 1e-10;

/// Default relative tail energy used for POD truncation.
pub const POD_ENERGY: f64 = 1e-8;

/// Relative roundoff allowed when a computed `c` is compared against a
/// closed-form bound; the bound is attained exactly when `m = n`.
pub const BOUND_ROUNDOFF: f64 = 64.0 * EPS;

/// Largest exhaustive enumeration accepted by the volume oracle.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

/// Downdated column norms are recomputed when `(new/old)^2` falls below
/// this value.
pub fn norm_recompute_threshold() -> f64 {
    EPS.sqrt()
}
