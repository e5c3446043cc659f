//! Dense linear-algebra kernels.

pub mod haar;
pub mod ice;
pub mod lu;
pub mod qr;
pub mod svd;
pub mod triangular;

pub use haar::{haar_orthonormal, haar_orthonormal_with};
pub use ice::{ice_append, ice_estimate, IceState};
pub use lu::{determinant, BandedLu, DenseLu};
pub use qr::{householder_qr, qr_column_pivoted, Householder, HouseholderQr, PivotedQrFactor};
pub use svd::{inverse_norm, smallest_singular_value, spectral_norm, thin_svd, ThinSvd};
pub use triangular::{
    solve_upper_in_place, solve_upper_transposed_in_place, solve_upper_triangular,
};
