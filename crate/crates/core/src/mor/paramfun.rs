//! Parametrized test functions sampled on a grid.

use serde::{Deserialize, Serialize};

use crate::error::{DeimError, Result};
use crate::matrix::{norm2, Matrix};
use crate::pod::SnapshotSet;
use crate::projector::DeimProjector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamFunKind {
    /// `10 e^{−μt} (cos 4μt + sin 4μt)` on `t ∈ [1, 6]`.
    DecayingOscillation,
    /// `sinh(μ cosh(μ/x))` on `x ∈ [0.1, 6]`.
    SinhCosh,
}

impl ParamFunKind {
    pub fn eval(self, t: f64, mu: f64) -> f64 {
        match self {
            ParamFunKind::DecayingOscillation => {
                10.0 * (-mu * t).exp() * ((4.0 * mu * t).cos() + (4.0 * mu * t).sin())
            }
            ParamFunKind::SinhCosh => (mu * (mu / t).cosh()).sinh(),
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            ParamFunKind::DecayingOscillation => (1.0, 6.0),
            ParamFunKind::SinhCosh => (0.1, 6.0),
        }
    }

    /// Grid size used in the reference experiments.
    pub fn default_points(self) -> usize {
        match self {
            ParamFunKind::DecayingOscillation => 10_000,
            ParamFunKind::SinhCosh => 2_000,
        }
    }

    pub fn column(self, grid: &[f64], mu: f64) -> Vec<f64> {
        grid.iter().map(|&t| self.eval(t, mu)).collect()
    }
}

/// `count` equally spaced points on `[a, b]`, end points included.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Snapshot matrix with one column per `μ`. Columns containing non-finite
/// values are left out and their `μ` positions returned.
pub fn param_fun_snapshots(
    kind: ParamFunKind,
    grid: &[f64],
    mu_grid: &[f64],
) -> Result<(SnapshotSet, Vec<usize>)> {
    if grid.is_empty() || mu_grid.is_empty() {
        return Err(DeimError::InvalidArgument("empty grid".into()));
    }
    if kind == ParamFunKind::SinhCosh && grid.iter().any(|&x| x < 0.1) {
        return Err(DeimError::InvalidArgument(
            "sinh-cosh grid must satisfy x >= 0.1".into(),
        ));
    }
    let mut cols = Vec::new();
    let mut coords = Vec::new();
    let mut flagged = Vec::new();
    for (j, &mu) in mu_grid.iter().enumerate() {
        let col = kind.column(grid, mu);
        if col.iter().all(|v| v.is_finite()) {
            cols.push(col);
            coords.push(mu);
        } else {
            flagged.push(j);
        }
    }
    if cols.is_empty() {
        return Err(DeimError::InvalidArgument(
            "every snapshot column overflowed".into(),
        ));
    }
    let matrix = Matrix::from_columns(grid.len(), &cols)?;
    Ok((SnapshotSet::new(matrix, coords)?, flagged))
}

/// Relative projection errors over a set of parameter values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub mu: Vec<f64>,
    /// `‖f_μ − f̂_μ‖ / ‖f_μ‖`; absolute error where the column is zero, NaN
    /// where it overflowed.
    pub errors: Vec<f64>,
    /// Positions whose true column is zero or non-finite.
    pub flagged: Vec<usize>,
}

impl SweepResult {
    /// Largest error over unflagged points.
    pub fn max_error(&self) -> f64 {
        self.errors
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.flagged.contains(i))
            .map(|(_, &e)| e)
            .fold(0.0, f64::max)
    }
}

pub fn approximation_sweep(
    proj: &DeimProjector,
    kind: ParamFunKind,
    grid: &[f64],
    mu_eval: &[f64],
) -> Result<SweepResult> {
    if grid.len() != proj.dim() {
        return Err(DeimError::dims(
            "approximation_sweep",
            proj.dim(),
            grid.len(),
        ));
    }
    let mut errors = Vec::with_capacity(mu_eval.len());
    let mut flagged = Vec::new();
    for (j, &mu) in mu_eval.iter().enumerate() {
        let f = kind.column(grid, mu);
        if f.iter().any(|v| !v.is_finite()) {
            flagged.push(j);
            errors.push(f64::NAN);
            continue;
        }
        let fhat = proj.apply(&f)?;
        let diff: Vec<f64> = f.iter().zip(&fhat).map(|(a, b)| a - b).collect();
        let nf = norm2(&f);
        if nf == 0.0 {
            flagged.push(j);
            errors.push(norm2(&diff));
        } else {
            errors.push(norm2(&diff) / nf);
        }
    }
    Ok(SweepResult {
        mu: mu_eval.to_vec(),
        errors,
        flagged,
    })
}
