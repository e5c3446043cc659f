use thiserror::Error;

use crate::selection::SelectionReport;

pub type Result<T, E = DeimError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DeimError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("triangular factor is singular: zero diagonal at index {index}")]
    Singular { index: usize },

    #[error("matrix is numerically rank deficient: pivot {index} has magnitude {pivot:e} (threshold {threshold:e})")]
    RankDeficient {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("basis columns are linearly dependent: residual vanished at step {step}")]
    DependentBasis { step: usize },

    #[error("selected block U(sel,:) is singular for indices {indices:?}")]
    SingularSelection { indices: Vec<usize> },

    #[error("row-visit budget exhausted after {} rows with {} of {} pivots accepted", .partial.rows_visited, .partial.selection.len(), .wanted)]
    BudgetExceeded {
        partial: Box<SelectionReport>,
        wanted: usize,
    },

    #[error(
        "instance too large for exhaustive search: {combinations} combinations (limit {limit})"
    )]
    TooLarge { combinations: f64, limit: f64 },

    #[error("basis is not orthonormal: max |VᵀV - I| = {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("nonlinearity component {component} reads coordinate {coordinate} outside its declared pattern")]
    PatternViolation { component: usize, coordinate: usize },

    #[error("time integration produced non-finite state at t = {time}")]
    IntegrationBlowup { time: f64 },

    #[error("all {trials} random draws produced singular submatrices")]
    AllDrawsSingular { trials: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl DeimError {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl ToString,
        actual: impl ToString,
    ) -> Self {
        DeimError::DimensionMismatch {
            context,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}
