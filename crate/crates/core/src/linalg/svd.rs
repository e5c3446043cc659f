//! Thin SVD by one-sided Jacobi.
//!
//! The tall orientation `G` (rows ≥ cols) is first reduced by pivoted QR,
//! `G Π = Q R`, and the Jacobi sweeps run on `Rᵀ`. Rotations are accumulated
//! into `J`, so that `G = (Q J) Σ (Π Ũ)ᵀ` where `Ũ` holds the normalized
//! columns of `Rᵀ J`. Trailing rows of `R` that are negligible at the level
//! of `EPS²` relative to `‖R‖` are dropped before the sweeps.

use crate::error::Result;
use crate::linalg::qr::qr_column_pivoted;
use crate::matrix::{dot, Matrix};
use crate::tol;

/// `A = Z · diag(sigma) · Yᵀ` with `k = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub z: Matrix,
    pub sigma: Vec<f64>,
    pub y: Matrix,
    /// Number of Jacobi sweeps performed.
    pub sweeps: usize,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> Matrix {
        let mut zs = self.z.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            zs.col_mut(j).iter_mut().for_each(|v| *v *= s);
        }
        zs.matmul(&self.y.transpose()).expect("conformal factors")
    }
}

// Columns whose (scaled) norm falls below this are replaced by an orthonormal
// completion; their squared norms would otherwise underflow.
const NEGLIGIBLE: f64 = 1e-150;

pub fn thin_svd(a: &Matrix) -> Result<ThinSvd> {
    a.ensure_finite()?;
    let (n, cols) = a.shape();
    let k = n.min(cols);
    let scale = a.max_abs();
    if k == 0 || scale == 0.0 {
        return Ok(ThinSvd {
            z: Matrix::eye(n, k),
            sigma: vec![0.0; k],
            y: Matrix::eye(cols, k),
            sweeps: 0,
        });
    }

    let transposed = n < cols;
    let mut g = if transposed { a.transpose() } else { a.clone() };
    g.scale(1.0 / scale);

    let qr = qr_column_pivoted(&g)?;
    let rho = leading_rank(&qr.r_factor, k);
    // X = R̃ᵀ (k × ρ), R̃ the leading ρ rows of R.
    let mut x = Matrix::from_fn(k, rho, |i, j| qr.r_factor[(j, i)]);
    let mut jmat = Matrix::identity(rho);
    let sweeps = jacobi_sweeps(&mut x, &mut jmat);

    let mut sigma: Vec<f64> = (0..rho).map(|j| dot(x.col(j), x.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..rho).collect();
    order.sort_by(|&p, &q| sigma[q].total_cmp(&sigma[p]).then(p.cmp(&q)));

    let mut u_tilde = Matrix::zeros(k, k);
    let mut j_sorted = Matrix::zeros(k, k);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        j_sorted.col_mut(dst)[..rho].copy_from_slice(jmat.col(src));
        let s = sigma[src];
        if s > NEGLIGIBLE {
            let c = u_tilde.col_mut(dst);
            for (ci, xi) in c.iter_mut().zip(x.col(src)) {
                *ci = xi / s;
            }
        } else {
            deficient.push(dst);
        }
    }
    for dst in rho..k {
        j_sorted[(dst, dst)] = 1.0;
        deficient.push(dst);
    }
    sigma = order.iter().map(|&j| sigma[j]).collect();
    sigma.resize(k, 0.0);
    complete_orthonormal(&mut u_tilde, &deficient);

    // Left factor of G: Q · J (p × k).
    let p = g.rows();
    let mut left = Matrix::zeros(p, k);
    for j in 0..k {
        let col = left.col_mut(j);
        col[..k].copy_from_slice(j_sorted.col(j));
        for h in qr.reflectors.iter().rev() {
            h.apply(col);
        }
    }
    // Right factor of G: Π · Ũ (k × k, rows placed at their original positions).
    let mut right = Matrix::zeros(k, k);
    for (pos, &orig) in qr.perm.iter().enumerate().take(k) {
        for j in 0..k {
            right[(orig, j)] = u_tilde[(pos, j)];
        }
    }

    sigma.iter_mut().for_each(|s| *s *= scale);
    let (z, y) = if transposed {
        (right, left)
    } else {
        (left, right)
    };
    Ok(ThinSvd {
        z,
        sigma,
        y,
        sweeps,
    })
}

/// Number of leading rows of `R` kept for the Jacobi phase: the trailing rows
/// are dropped once their Frobenius norm is below `EPS²·‖R‖_F`, a perturbation
/// far below the accuracy of the computed factors.
fn leading_rank(r: &Matrix, k: usize) -> usize {
    let row_sq: Vec<f64> = (0..k)
        .map(|i| (i..r.cols()).map(|j| r[(i, j)] * r[(i, j)]).sum())
        .collect();
    let total: f64 = row_sq.iter().sum();
    let cut = tol::EPS.powi(4) * total;
    let mut tail = 0.0;
    let mut rho = k;
    while rho > 1 && tail + row_sq[rho - 1] <= cut {
        tail += row_sq[rho - 1];
        rho -= 1;
    }
    rho
}

/// Row-cyclic one-sided Jacobi on the columns of `x`, accumulating the
/// rotations into `v`. Returns the number of sweeps performed.
fn jacobi_sweeps(x: &mut Matrix, v: &mut Matrix) -> usize {
    let k = x.cols();
    let mut norms: Vec<f64> = (0..k).map(|j| dot(x.col(j), x.col(j))).collect();
    for sweep in 1..=tol::JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let a = norms[p];
                let b = norms[q];
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let c = dot(x.col(p), x.col(q));
                if c.abs() <= tol::JACOBI_COSINE * (a.sqrt() * b.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * c);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(x, p, q, cs, sn);
                rotate(v, p, q, cs, sn);
                norms[p] = a - t * c;
                norms[q] = b + t * c;
            }
        }
        if !rotated {
            return sweep;
        }
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = dot(x.col(j), x.col(j));
        }
    }
    tol::JACOBI_MAX_SWEEPS
}

#[inline]
fn rotate(m: &mut Matrix, p: usize, q: usize, cs: f64, sn: f64) {
    let (cp, cq) = m.col_pair_mut(p, q);
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq;
        *xp = cs * a - sn * b;
        *xq = sn * a + cs * b;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every
/// other column, via twice-applied Gram–Schmidt against canonical vectors.
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &target in missing {
        loop {
            assert!(
                candidate < n,
                "orthonormal completion ran out of directions"
            );
            let mut v = vec![0.0; n];
            v[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &f in &filled {
                    let col = u.col(f);
                    let proj = dot(col, &v);
                    for (vi, ci) in v.iter_mut().zip(col) {
                        *vi -= proj * ci;
                    }
                }
            }
            let nv = dot(&v, &v).sqrt();
            if nv > 0.5 {
                u.col_mut(target)
                    .iter_mut()
                    .zip(&v)
                    .for_each(|(d, s)| *d = s / nv);
                filled.push(target);
                break;
            }
        }
    }
}

/// σ_min of a square matrix, via [`thin_svd`].
pub fn smallest_singular_value(t: &Matrix) -> Result<f64> {
    if t.rows() != t.cols() {
        return Err(crate::error::DeimError::dims(
            "smallest_singular_value",
            "square",
            format!("{}x{}", t.rows(), t.cols()),
        ));
    }
    let svd = thin_svd(t)?;
    Ok(svd.sigma.last().copied().unwrap_or(0.0))
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    Ok(thin_svd(a)?.sigma.first().copied().unwrap_or(0.0))
}

/// `‖A⁻¹‖₂ = 1/σ_min(A)` for square `A`; infinite when singular.
pub fn inverse_norm(a: &Matrix) -> Result<f64> {
    let s = smallest_singular_value(a)?;
    Ok(if s > 0.0 { 1.0 / s } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_factors(a: &Matrix, svd: &ThinSvd) {
        let k = a.rows().min(a.cols());
        assert_eq!(svd.sigma.len(), k);
        assert!(svd.z.orthonormality_defect() < 1e-12);
        assert!(svd.y.orthonormality_defect() < 1e-12);
        for w in svd.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(svd.sigma.iter().all(|&s| s >= 0.0));
        let err = svd.reconstruct().sub(a).unwrap().frobenius_norm();
        let bound = 100.0 * k as f64 * f64::EPSILON * a.frobenius_norm();
        assert!(err <= bound, "reconstruction {err} > {bound}");
    }

    #[test]
    fn diagonal_input() {
        let a = Matrix::diag(&[3.0, 1.0]);
        let svd = thin_svd(&a).unwrap();
        assert!((svd.sigma[0] - 3.0).abs() < 1e-15);
        assert!((svd.sigma[1] - 1.0).abs() < 1e-15);
        for i in 0..2 {
            assert!((svd.z[(i, i)].abs() - 1.0).abs() < 1e-15);
            assert!((svd.y[(i, i)].abs() - 1.0).abs() < 1e-15);
        }
        check_factors(&a, &svd);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [2.0, 1.0, -1.0];
        let a = Matrix::from_fn(4, 3, |i, j| u[i] * v[j]);
        let svd = thin_svd(&a).unwrap();
        let expect = crate::matrix::norm2(&u) * crate::matrix::norm2(&v);
        assert!((svd.sigma[0] - expect).abs() < 1e-13 * expect);
        assert!(svd.sigma[1] < 1e-14 * expect);
        check_factors(&a, &svd);
        check_factors(&a.transpose(), &thin_svd(&a.transpose()).unwrap());
    }

    #[test]
    fn zero_matrix() {
        let a = Matrix::zeros(3, 5);
        let svd = thin_svd(&a).unwrap();
        assert_eq!(svd.sigma, vec![0.0; 3]);
        check_factors(&a, &svd);
    }

    #[test]
    fn wide_and_tall_agree() {
        let a = Matrix::from_fn(5, 9, |i, j| {
            ((i * 7 + j * 3) % 11) as f64 - 5.0 + 0.1 * i as f64
        });
        let s1 = thin_svd(&a).unwrap();
        let s2 = thin_svd(&a.transpose()).unwrap();
        for (x, y) in s1.sigma.iter().zip(&s2.sigma) {
            assert!((x - y).abs() < 1e-13 * s1.sigma[0]);
        }
        check_factors(&a, &s1);
    }

    #[test]
    fn smallest_singular_value_of_diagonal() {
        assert!((smallest_singular_value(&Matrix::identity(4)).unwrap() - 1.0).abs() < 1e-15);
        let d = Matrix::diag(&[5.0, 0.2]);
        assert!((smallest_singular_value(&d).unwrap() - 0.2).abs() < 1e-15);
    }
}
