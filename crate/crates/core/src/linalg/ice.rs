//! Incremental estimation of `‖T⁻¹‖₂` for a growing upper-triangular `T`.
//!
//! The state keeps `z = T⁻ᵀ d` for a unit vector `d` chosen greedily. When a
//! column `(v, δ)` is appended, the new right-hand side is `(s·d, c)` with
//! `s² + c² = 1`, which gives `z' = (s·z, (c − s·vᵀz)/δ)`. The pair `(s, c)`
//! maximizing `‖z'‖` is the dominant eigenvector of a 2 × 2 symmetric matrix.
//! Since `‖d‖ = 1`, `‖z‖` never exceeds the true norm of the inverse.

use crate::error::{DeimError, Result};
use crate::matrix::{dot, norm2};

#[derive(Clone, Debug, Default)]
pub struct IceState {
    dim: usize,
    direction: Vec<f64>,
    gamma: f64,
}

impl IceState {
    pub fn new() -> Self {
        IceState::default()
    }

    /// Current triangular size.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Estimate of `‖T(1:j,1:j)⁻¹‖₂` (a lower bound).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Unit vector along `T⁻ᵀ d`.
    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    /// Returns the state for `T` extended by the column `(new_column, new_diag)`.
    ///
    /// `new_column` holds the `dim` entries above the diagonal.
    pub fn append(&self, new_column: &[f64], new_diag: f64) -> Result<IceState> {
        if new_column.len() != self.dim {
            return Err(DeimError::dims("ice_append", self.dim, new_column.len()));
        }
        if new_diag == 0.0 || !new_diag.is_finite() {
            return Err(DeimError::Singular { index: self.dim });
        }
        if self.dim == 0 {
            return Ok(IceState {
                dim: 1,
                direction: vec![new_diag.signum()],
                gamma: 1.0 / new_diag.abs(),
            });
        }

        let zeta = self.gamma;
        let alpha = zeta * dot(&self.direction, new_column);
        let inv = 1.0 / new_diag;
        let m11 = zeta * zeta + alpha * alpha * inv * inv;
        let m12 = -alpha * inv * inv;
        let m22 = inv * inv;
        let (s, c) = dominant_eigenvector(m11, m12, m22);

        let mut z: Vec<f64> = self.direction.iter().map(|d| s * zeta * d).collect();
        z.push((c - s * alpha) * inv);
        let norm = norm2(&z);
        z.iter_mut().for_each(|v| *v /= norm);
        Ok(IceState {
            dim: self.dim + 1,
            direction: z,
            gamma: norm.max(self.gamma),
        })
    }
}

pub fn ice_append(state: &IceState, new_column: &[f64], new_diag: f64) -> Result<IceState> {
    state.append(new_column, new_diag)
}

/// Runs the estimator over every leading block of an upper-triangular matrix.
pub fn ice_estimate(t: &crate::matrix::Matrix) -> Result<IceState> {
    let mut state = IceState::new();
    for j in 0..t.cols() {
        state = state.append(&t.col(j)[..j], t[(j, j)])?;
    }
    Ok(state)
}

/// Unit eigenvector of `[[a, b], [b, d]]` for its largest eigenvalue.
fn dominant_eigenvector(a: f64, b: f64, d: f64) -> (f64, f64) {
    if b == 0.0 {
        return if a >= d { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let half_gap = 0.5 * (a - d);
    let lambda = 0.5 * (a + d) + half_gap.hypot(b);
    // Two algebraically equivalent candidates; keep the better-scaled one.
    let (x1, y1) = (b, lambda - a);
    let (x2, y2) = (lambda - d, b);
    let (x, y) = if x1.hypot(y1) >= x2.hypot(y2) {
        (x1, y1)
    } else {
        (x2, y2)
    };
    let r = x.hypot(y);
    (x / r, y / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn identity_keeps_gamma_one() {
        let mut s = IceState::new();
        for j in 0..6 {
            s = s.append(&vec![0.0; j], 1.0).unwrap();
            assert!((s.gamma() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_case_is_exact() {
        let t = Matrix::diag(&[1.0, 1e-3]);
        let s = ice_estimate(&t).unwrap();
        assert!(s.gamma() >= 1000.0 * (1.0 - 1e-12));
        assert!(s.gamma() <= 1000.0 * (1.0 + 1e-12));
    }

    #[test]
    fn zero_diagonal_is_singular_growth() {
        let s = IceState::new().append(&[], 2.0).unwrap();
        assert!(matches!(
            s.append(&[1.0], 0.0),
            Err(DeimError::Singular { index: 1 })
        ));
    }

    #[test]
    fn gamma_is_monotone_and_direction_unit() {
        let t = Matrix::from_rows(&[
            [1.0, -0.9, 0.3, 0.2],
            [0.0, 0.5, -0.4, 0.1],
            [0.0, 0.0, 0.2, -0.15],
            [0.0, 0.0, 0.0, 0.1],
        ]);
        let mut s = IceState::new();
        let mut last = 0.0;
        for j in 0..4 {
            s = s.append(&t.col(j)[..j], t[(j, j)]).unwrap();
            assert!(s.gamma() >= last);
            last = s.gamma();
            assert!((norm2(s.direction()) - 1.0).abs() < 1e-14);
        }
    }
}
