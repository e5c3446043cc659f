//! Q-DEIM: selection from the column-pivoted QR factorization of `Uᵀ`.

use std::time::Instant;

use crate::error::Result;
use crate::linalg::qr::{check_full_rank, qr_column_pivoted, PivotedQrFactor};
use crate::matrix::Matrix;
use crate::selection::{check_basis, report_for, SelectionOperator, SelectionReport};

/// `√(n−m+1) · √(4ᵐ + 6m − 1) / 3`, the a priori bound on `c` for orthonormal `U`.
pub fn qdeim_bound(n: usize, m: usize) -> f64 {
    let m_f = m as f64;
    let growth = (4f64.powi(m as i32) + 6.0 * m_f - 1.0).sqrt() / 3.0;
    ((n - m + 1) as f64).sqrt() * growth
}

/// `√(1 + m(n−m))`, the bound attained by a volume-maximizing selection.
pub fn volume_optimal_bound(n: usize, m: usize) -> f64 {
    (1.0 + (m * (n - m)) as f64).sqrt()
}

/// Q-DEIM selection together with the factorization of `Uᵀ` it came from.
pub fn qdeim_factor(u: &Matrix) -> Result<(SelectionOperator, PivotedQrFactor)> {
    check_basis(u, "qdeim_select")?;
    let (n, m) = u.shape();
    let qr = qr_column_pivoted(&u.transpose())?;
    check_full_rank(&qr, m, n)?;
    let sel = SelectionOperator::new(qr.perm[..m].to_vec(), n)?;
    Ok((sel, qr))
}

pub fn qdeim_select(u: &Matrix) -> Result<SelectionOperator> {
    Ok(qdeim_factor(u)?.0)
}

/// [`qdeim_select`] with exact `c` and timing.
pub fn qdeim_report(u: &Matrix) -> Result<SelectionReport> {
    let started = Instant::now();
    let sel = qdeim_select(u)?;
    let (n, m) = u.shape();
    report_for(u, sel, qdeim_bound(n, m), n, started)
}
