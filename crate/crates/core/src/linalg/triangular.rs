//! Triangular solves.

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;

/// Solves `T x = b` in place by back substitution; `T` is upper triangular.
pub fn solve_upper_in_place(t: &Matrix, x: &mut [f64]) -> Result<()> {
    let m = t.rows();
    if t.cols() != m || x.len() != m {
        return Err(DeimError::dims("solve_upper", m, x.len()));
    }
    for i in (0..m).rev() {
        let d = t[(i, i)];
        if d == 0.0 {
            return Err(DeimError::Singular { index: i });
        }
        let xi = x[i] / d;
        x[i] = xi;
        if xi != 0.0 {
            let col = &t.col(i)[..i];
            for (xk, tk) in x[..i].iter_mut().zip(col) {
                *xk -= xi * tk;
            }
        }
    }
    Ok(())
}

/// Solves `Tᵀ x = b` in place (forward substitution); `T` is upper triangular.
pub fn solve_upper_transposed_in_place(t: &Matrix, x: &mut [f64]) -> Result<()> {
    let m = t.rows();
    if t.cols() != m || x.len() != m {
        return Err(DeimError::dims("solve_upper_transposed", m, x.len()));
    }
    for i in 0..m {
        let d = t[(i, i)];
        if d == 0.0 {
            return Err(DeimError::Singular { index: i });
        }
        let col = &t.col(i)[..i];
        let s: f64 = col.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
        x[i] = (x[i] - s) / d;
    }
    Ok(())
}

/// Solves `T X = B` column by column.
pub fn solve_upper_triangular(t: &Matrix, b: &Matrix) -> Result<Matrix> {
    if t.rows() != t.cols() || b.rows() != t.rows() {
        return Err(DeimError::dims(
            "solve_upper_triangular",
            format!("{}x{} system", t.rows(), t.rows()),
            format!("{}x{} rhs", b.rows(), b.cols()),
        ));
    }
    let mut x = b.clone();
    for j in 0..x.cols() {
        solve_upper_in_place(t, x.col_mut(j))?;
    }
    Ok(x)
}
