//! Interpolation-index selection.

mod deim;
mod oracle;
mod qdeim;
mod qdeimr;
mod refine;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{DeimError, Result};
use crate::linalg::inverse_norm;
use crate::matrix::Matrix;

pub use deim::{deim_select, lu_pp_select};
pub use oracle::{brute_force_volume_select, random_select};
pub use qdeim::{qdeim_bound, qdeim_factor, qdeim_report, qdeim_select, volume_optimal_bound};
pub use qdeimr::{
    default_threshold, qdeimr_select, sub_seed, QdeimrConfig, RestartPolicy, Sampling,
};
pub use refine::refine_volume;

/// Named selection algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Deim,
    Qdeim,
    Qdeimr,
    Lu,
    Random,
    Volume,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Deim => "deim",
            Method::Qdeim => "qdeim",
            Method::Qdeimr => "qdeimr",
            Method::Lu => "lu",
            Method::Random => "random",
            Method::Volume => "volume",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        [
            Method::Deim,
            Method::Qdeim,
            Method::Qdeimr,
            Method::Lu,
            Method::Random,
            Method::Volume,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered row indices `℘`, i.e. the columns of the identity forming `S`.
///
/// Indices are 0-based in memory and 1-based in serialized form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionOperator {
    indices: Vec<usize>,
    ambient_dim: usize,
}

impl SelectionOperator {
    pub fn new(indices: Vec<usize>, ambient_dim: usize) -> Result<Self> {
        let mut seen = vec![false; ambient_dim];
        for &i in &indices {
            if i >= ambient_dim {
                return Err(DeimError::InvalidArgument(format!(
                    "selection index {} out of range 1..={ambient_dim}",
                    i + 1
                )));
            }
            if seen[i] {
                return Err(DeimError::InvalidArgument(format!(
                    "selection index {} repeated",
                    i + 1
                )));
            }
            seen[i] = true;
        }
        Ok(SelectionOperator {
            indices,
            ambient_dim,
        })
    }

    /// Builds from 1-based indices.
    pub fn from_one_based(indices: &[usize], ambient_dim: usize) -> Result<Self> {
        if indices.contains(&0) {
            return Err(DeimError::InvalidArgument("1-based index 0".into()));
        }
        Self::new(indices.iter().map(|i| i - 1).collect(), ambient_dim)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// `Sᵀ U = U(℘, :)`.
    pub fn apply_rows(&self, u: &Matrix) -> Matrix {
        u.select_rows(&self.indices)
    }

    /// `Sᵀ f`.
    pub fn gather(&self, f: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| f[i]).collect()
    }

    /// Explicit `n × m` matrix `S`.
    pub fn to_matrix(&self) -> Matrix {
        let mut s = Matrix::zeros(self.ambient_dim, self.len());
        for (j, &i) in self.indices.iter().enumerate() {
            s[(i, j)] = 1.0;
        }
        s
    }
}

/// `c = ‖(SᵀU)⁻¹‖₂`, infinite if the block is singular.
pub fn condition_of(u: &Matrix, sel: &SelectionOperator) -> Result<f64> {
    if sel.ambient_dim() != u.rows() || sel.len() != u.cols() {
        return Err(DeimError::dims(
            "condition_of",
            format!("{}x{}", u.rows(), u.cols()),
            format!("selection of {} in {}", sel.len(), sel.ambient_dim()),
        ));
    }
    inverse_norm(&sel.apply_rows(u))
}

/// Outcome of a selection run.
#[derive(Clone, Debug)]
pub struct SelectionReport {
    pub selection: SelectionOperator,
    pub c_exact: f64,
    pub c_bound_used: f64,
    pub rows_visited: usize,
    pub resample_rounds: usize,
    pub wall_time: Duration,
}

/// Serialized form of a selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub n: usize,
    pub m: usize,
    /// 1-based.
    pub indices: Vec<usize>,
    pub c: f64,
    pub method: String,
    pub seed: Option<u64>,
    pub rows_visited: usize,
}

impl SelectionRecord {
    pub fn new(report: &SelectionReport, method: &str, seed: Option<u64>) -> Self {
        SelectionRecord {
            n: report.selection.ambient_dim(),
            m: report.selection.len(),
            indices: report.selection.one_based(),
            c: report.c_exact,
            method: method.to_string(),
            seed,
            rows_visited: report.rows_visited,
        }
    }

    pub fn selection(&self) -> Result<SelectionOperator> {
        SelectionOperator::from_one_based(&self.indices, self.n)
    }
}

/// Wraps a deterministic selection into a report with exact `c`.
pub(crate) fn report_for(
    u: &Matrix,
    selection: SelectionOperator,
    c_bound_used: f64,
    rows_visited: usize,
    started: std::time::Instant,
) -> Result<SelectionReport> {
    let c_exact = condition_of(u, &selection)?;
    Ok(SelectionReport {
        selection,
        c_exact,
        c_bound_used,
        rows_visited,
        resample_rounds: 0,
        wall_time: started.elapsed(),
    })
}

pub(crate) fn check_basis(u: &Matrix, context: &'static str) -> Result<()> {
    if u.cols() == 0 || u.rows() < u.cols() {
        return Err(DeimError::dims(
            context,
            "n x m with n >= m >= 1",
            format!("{}x{}", u.rows(), u.cols()),
        ));
    }
    u.ensure_finite()
}
