//! Random orthonormal matrices distributed by Haar measure.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{DeimError, Result};
use crate::linalg::qr::householder_qr;
use crate::matrix::Matrix;

/// `n × m` matrix with orthonormal columns, drawn from the seed.
pub fn haar_orthonormal(n: usize, m: usize, seed: u64) -> Result<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_orthonormal_with(n, m, &mut rng)
}

/// Same as [`haar_orthonormal`], drawing from a caller-supplied generator.
///
/// QR of an i.i.d. standard normal matrix, with the columns of `Q` flipped so
/// that `R` has a non-negative diagonal.
pub fn haar_orthonormal_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Matrix> {
    if m > n {
        return Err(DeimError::InvalidArgument(format!(
            "haar_orthonormal needs m <= n (got m = {m}, n = {n})"
        )));
    }
    if m == 0 {
        return Err(DeimError::InvalidArgument(
            "haar_orthonormal needs m >= 1".into(),
        ));
    }
    let g = Matrix::from_fn(n, m, |_, _| rng.sample(StandardNormal));
    let qr = householder_qr(&g)?;
    let mut q = qr.q_thin(m);
    for j in 0..m {
        if qr.r_factor[(j, j)] < 0.0 {
            q.col_mut(j).iter_mut().for_each(|v| *v = -*v);
        }
    }
    Ok(q)
}
