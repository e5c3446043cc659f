//! Interpolation-index selection for empirical interpolation, oblique
//! projectors, POD, and Galerkin reduced-order models.

pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod mor;
pub mod pod;
pub mod projector;
pub mod selection;
pub mod tol;

pub use error::{DeimError, Result};
pub use matrix::Matrix;
