//! Snapshot matrices and POD bases.

use crate::error::{DeimError, Result};
use crate::linalg::thin_svd;
use crate::matrix::{norm2, Matrix};
use crate::tol;

/// Snapshots as columns, with the time or parameter value of each column.
#[derive(Clone, Debug)]
pub struct SnapshotSet {
    pub matrix: Matrix,
    pub coords: Vec<f64>,
}

impl SnapshotSet {
    pub fn new(matrix: Matrix, coords: Vec<f64>) -> Result<Self> {
        if matrix.cols() == 0 || matrix.cols() != coords.len() {
            return Err(DeimError::dims("SnapshotSet", matrix.cols(), coords.len()));
        }
        Ok(SnapshotSet { matrix, coords })
    }

    /// Column indices as coordinates.
    pub fn indexed(matrix: Matrix) -> Result<Self> {
        let coords = (0..matrix.cols()).map(|j| j as f64).collect();
        Self::new(matrix, coords)
    }

    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.cols() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    Rank(usize),
    /// Smallest `r` with `Σ_{i>r} σᵢ² ≤ tol² · Σ σᵢ²`.
    Energy(f64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Energy(tol::POD_ENERGY)
    }
}

#[derive(Clone, Debug)]
pub struct PodBasis {
    pub vectors: Matrix,
    pub singular_values: Vec<f64>,
    pub rank_used: usize,
}

/// Leading left singular vectors of the snapshot matrix. With `center`, the
/// mean snapshot is subtracted first.
pub fn pod_basis(snaps: &SnapshotSet, truncation: Truncation, center: bool) -> Result<PodBasis> {
    let x = if center {
        centered(&snaps.matrix)
    } else {
        snaps.matrix.clone()
    };
    let k = x.rows().min(x.cols());
    let svd = thin_svd(&x)?;
    let r = match truncation {
        Truncation::Rank(r) => {
            if r == 0 || r > k {
                return Err(DeimError::InvalidArgument(format!(
                    "POD rank {r} outside 1..={k}"
                )));
            }
            r
        }
        Truncation::Energy(tol) => {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(DeimError::InvalidArgument(format!(
                    "energy tolerance {tol} outside (0, 1)"
                )));
            }
            energy_rank(&svd.sigma, tol)
        }
    };
    Ok(PodBasis {
        vectors: svd.z.leading_cols(r),
        singular_values: svd.sigma,
        rank_used: r,
    })
}

fn energy_rank(sigma: &[f64], tol: f64) -> usize {
    // Suffix sums avoid the cancellation of subtracting from the total.
    let mut tails = vec![0.0; sigma.len() + 1];
    for i in (0..sigma.len()).rev() {
        tails[i] = tails[i + 1] + sigma[i] * sigma[i];
    }
    let total = tails[0];
    if total == 0.0 {
        return 1;
    }
    (1..=sigma.len())
        .find(|&r| tails[r] <= tol * tol * total)
        .unwrap_or(sigma.len())
}

fn centered(x: &Matrix) -> Matrix {
    let n_cols = x.cols() as f64;
    let mean: Vec<f64> = (0..x.rows())
        .map(|i| x.row(i).iter().sum::<f64>() / n_cols)
        .collect();
    Matrix::from_fn(x.rows(), x.cols(), |i, j| x[(i, j)] - mean[i])
}

/// `‖X − V X_r‖_F / ‖X‖_F`.
pub fn reconstruction_error(x: &Matrix, v: &Matrix, reduced: &Matrix) -> Result<f64> {
    let lifted = v.matmul(reduced)?;
    let diff = x.sub(&lifted)?;
    Ok(diff.frobenius_norm() / x.frobenius_norm())
}

/// Per-row relative 2-norm errors between `X` and `X̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct RowErrors {
    /// Relative error per row; absolute error for rows listed in `zero_rows`.
    pub values: Vec<f64>,
    pub zero_rows: Vec<usize>,
}

pub fn rowwise_relative_errors(x: &Matrix, xhat: &Matrix) -> Result<RowErrors> {
    if x.shape() != xhat.shape() {
        return Err(DeimError::dims(
            "rowwise_relative_errors",
            format!("{:?}", x.shape()),
            format!("{:?}", xhat.shape()),
        ));
    }
    let mut values = Vec::with_capacity(x.rows());
    let mut zero_rows = Vec::new();
    for i in 0..x.rows() {
        let row = x.row(i);
        let diff: Vec<f64> = row.iter().zip(xhat.row(i)).map(|(a, b)| a - b).collect();
        let nrm = norm2(&row);
        let err = norm2(&diff);
        if nrm == 0.0 {
            zero_rows.push(i);
            values.push(err);
        } else {
            values.push(err / nrm);
        }
    }
    Ok(RowErrors { values, zero_rows })
}
