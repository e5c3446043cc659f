//! Householder QR, with and without Businger–Golub column pivoting.

use crate::error::{DeimError, Result};
use crate::matrix::{dot, norm2, Matrix};
use crate::tol;

const SAFE_MIN: f64 = f64::MIN_POSITIVE / f64::EPSILON;
const SAFE_LIFT: f64 = 1.0 / SAFE_MIN;

/// Elementary reflector `H = I − τ v vᵀ` acting on rows `offset..offset + v.len()`.
///
/// `v[0]` is always 1.
#[derive(Clone, Debug)]
pub struct Householder {
    pub offset: usize,
    pub tau: f64,
    pub v: Vec<f64>,
}

impl Householder {
    /// Builds the reflector that maps `x` onto `beta · e₁`; returns it with `beta`.
    pub fn annihilate(x: &[f64], offset: usize) -> (Householder, f64) {
        let mut v = vec![0.0; x.len()];
        v[0] = 1.0;
        if norm2(&x[1..]) == 0.0 {
            return (
                Householder {
                    offset,
                    tau: 0.0,
                    v,
                },
                x[0],
            );
        }
        // v and tau are invariant under scaling of x, so tiny inputs are
        // lifted out of the subnormal range first and beta is scaled back.
        let mut xs = x.to_vec();
        let mut lift = 1.0;
        if norm2(&xs) < SAFE_MIN {
            xs.iter_mut().for_each(|v| *v *= SAFE_LIFT);
            lift = SAFE_LIFT;
        }
        let alpha = xs[0];
        let beta = -alpha.signum() * alpha.hypot(norm2(&xs[1..]));
        let tau = (beta - alpha) / beta;
        let scale = 1.0 / (alpha - beta);
        for (vi, xi) in v[1..].iter_mut().zip(&xs[1..]) {
            *vi = xi * scale;
        }
        (Householder { offset, tau, v }, beta / lift)
    }

    /// Applies the reflector in place to a full-length column.
    #[inline]
    pub fn apply(&self, col: &mut [f64]) {
        if self.tau == 0.0 {
            return;
        }
        let seg = &mut col[self.offset..self.offset + self.v.len()];
        let w = self.tau * dot(&self.v, seg);
        if w != 0.0 {
            for (s, vi) in seg.iter_mut().zip(&self.v) {
                *s -= w * vi;
            }
        }
    }
}

/// Applies `H_{k-1} ⋯ H_1 H_0` (i.e. `Qᵀ`) to `col`.
pub fn apply_reflectors(reflectors: &[Householder], col: &mut [f64]) {
    for h in reflectors {
        h.apply(col);
    }
}

/// Output of [`qr_column_pivoted`]: `A·Π = Q·R`.
#[derive(Clone, Debug)]
pub struct PivotedQrFactor {
    /// Reflectors whose product `H_0 H_1 ⋯` is `Q`.
    pub reflectors: Vec<Householder>,
    /// Upper-trapezoidal `m × n` factor, columns in pivoted order.
    pub r_factor: Matrix,
    /// `perm[j]` is the original column placed at position `j`.
    pub perm: Vec<usize>,
    /// `|R_ii|` for each elimination step.
    pub diag_abs: Vec<f64>,
}

impl PivotedQrFactor {
    pub fn rows(&self) -> usize {
        self.r_factor.rows()
    }

    pub fn steps(&self) -> usize {
        self.diag_abs.len()
    }

    /// Leading `k × k` triangular block `T` of `R`.
    pub fn leading_triangle(&self, k: usize) -> Matrix {
        self.r_factor.block(0, k, 0, k)
    }

    /// Explicit `m × m` orthogonal factor.
    pub fn q_matrix(&self) -> Matrix {
        let m = self.rows();
        let mut q = Matrix::identity(m);
        for j in 0..m {
            let col = q.col_mut(j);
            for h in self.reflectors.iter().rev() {
                h.apply(col);
            }
        }
        q
    }

    /// `Qᵀ x` in place.
    pub fn apply_qt(&self, x: &mut [f64]) {
        apply_reflectors(&self.reflectors, x);
    }

    /// `R` with its columns returned to the original order, i.e. `Qᵀ A`.
    pub fn unpermuted_r(&self) -> Matrix {
        let mut out = Matrix::zeros(self.r_factor.rows(), self.r_factor.cols());
        for (j, &p) in self.perm.iter().enumerate() {
            out.col_mut(p).copy_from_slice(self.r_factor.col(j));
        }
        out
    }
}

/// Householder QR without pivoting: `A = Q·R`.
#[derive(Clone, Debug)]
pub struct HouseholderQr {
    pub reflectors: Vec<Householder>,
    pub r_factor: Matrix,
}

impl HouseholderQr {
    /// Thin orthogonal factor: the first `k` columns of `Q`.
    pub fn q_thin(&self, k: usize) -> Matrix {
        let m = self.r_factor.rows();
        let mut q = Matrix::eye(m, k);
        for j in 0..k {
            let col = q.col_mut(j);
            for h in self.reflectors.iter().rev() {
                h.apply(col);
            }
        }
        q
    }

    /// Leading `k × k` block of `R`.
    pub fn triangle(&self, k: usize) -> Matrix {
        self.r_factor.block(0, k, 0, k)
    }
}

fn tail_norm(col: &[f64], from: usize) -> f64 {
    if from >= col.len() {
        0.0
    } else {
        norm2(&col[from..])
    }
}

/// Businger–Golub QR with column pivoting.
///
/// At step `i` the column of largest trailing norm in `A(i:m, i:n)` is moved to
/// position `i`; ties within [`tol::PIVOT_TIE`] go to the smallest original
/// column index. Trailing norms are downdated after every reflector and
/// recomputed when cancellation makes the downdate unreliable, and the front
/// runners are re-measured exactly before a pivot is committed.
pub fn qr_column_pivoted(a: &Matrix) -> Result<PivotedQrFactor> {
    a.ensure_finite()?;
    let (m, n) = a.shape();
    let steps = m.min(n);
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut vn1: Vec<f64> = (0..n).map(|j| norm2(w.col(j))).collect();
    let mut vn2 = vn1.clone();
    let mut reflectors = Vec::with_capacity(steps);
    let mut diag_abs = Vec::with_capacity(steps);
    let recompute = tol::norm_recompute_threshold();

    for i in 0..steps {
        let p = choose_pivot(&w, i, &perm, &mut vn1, &mut vn2);
        if p != i {
            w.swap_cols(i, p);
            perm.swap(i, p);
            vn1.swap(i, p);
            vn2.swap(i, p);
        }

        let (h, beta) = Householder::annihilate(&w.col(i)[i..], i);
        {
            let col = w.col_mut(i);
            col[i] = beta;
            col[i + 1..].iter_mut().for_each(|v| *v = 0.0);
        }
        diag_abs.push(beta.abs());

        for j in i + 1..n {
            let col = w.col_mut(j);
            h.apply(col);
            if vn1[j] != 0.0 {
                let ratio = col[i].abs() / vn1[j];
                let temp = (1.0 - ratio * ratio).max(0.0);
                let rel = vn1[j] / vn2[j];
                if temp * rel * rel <= recompute {
                    vn1[j] = tail_norm(col, i + 1);
                    vn2[j] = vn1[j];
                } else {
                    vn1[j] *= temp.sqrt();
                }
            }
        }
        reflectors.push(h);
    }

    Ok(PivotedQrFactor {
        reflectors,
        r_factor: w,
        perm,
        diag_abs,
    })
}

fn choose_pivot(w: &Matrix, i: usize, perm: &[usize], vn1: &mut [f64], vn2: &mut [f64]) -> usize {
    let n = w.cols();
    let top = vn1[i..].iter().fold(0.0_f64, |a, &b| a.max(b));
    if top == 0.0 {
        return i;
    }
    let window = top * (1.0 - tol::PIVOT_RECHECK);
    let mut contenders = Vec::new();
    for j in i..n {
        if vn1[j] >= window {
            let exact = tail_norm(w.col(j), i);
            vn1[j] = exact;
            vn2[j] = exact;
            contenders.push(j);
        }
    }
    let best = contenders.iter().fold(0.0_f64, |a, &j| a.max(vn1[j]));
    let cut = best * (1.0 - tol::PIVOT_TIE);
    contenders
        .into_iter()
        .filter(|&j| vn1[j] >= cut)
        .min_by_key(|&j| perm[j])
        .unwrap_or(i)
}

/// Householder QR without pivoting.
pub fn householder_qr(a: &Matrix) -> Result<HouseholderQr> {
    a.ensure_finite()?;
    let (m, n) = a.shape();
    let steps = m.min(n);
    let mut w = a.clone();
    let mut reflectors = Vec::with_capacity(steps);
    for i in 0..steps {
        let (h, beta) = Householder::annihilate(&w.col(i)[i..], i);
        {
            let col = w.col_mut(i);
            col[i] = beta;
            col[i + 1..].iter_mut().for_each(|v| *v = 0.0);
        }
        for j in i + 1..n {
            h.apply(w.col_mut(j));
        }
        reflectors.push(h);
    }
    Ok(HouseholderQr {
        reflectors,
        r_factor: w,
    })
}

/// Checks `|R_ii|² ≥ Σ_{j=i..k} |R_jk|²` for every `i ≤ k ≤ steps`, with
/// `slack · EPS · |R_ii|²` tolerance. Returns the worst relative excess.
pub fn dominance_excess(r: &Matrix, steps: usize) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for k in 0..steps {
        for i in 0..=k {
            let rii = r[(i, i)] * r[(i, i)];
            let tail: f64 = (i..=k).map(|j| r[(j, k)] * r[(j, k)]).sum();
            if rii > 0.0 {
                worst = worst.max((tail - rii) / rii);
            } else if tail > 0.0 {
                worst = f64::INFINITY;
            }
        }
    }
    worst
}

/// Errors unless `|T_mm| ≥ n · EPS · |T_11|`.
pub fn check_full_rank(qr: &PivotedQrFactor, k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Ok(());
    }
    if qr.steps() < k {
        return Err(DeimError::RankDeficient {
            index: qr.steps(),
            pivot: 0.0,
            threshold: 0.0,
        });
    }
    let threshold = n as f64 * tol::EPS * qr.diag_abs[0];
    let last = qr.diag_abs[k - 1];
    if !(last >= threshold) || last == 0.0 {
        return Err(DeimError::RankDeficient {
            index: k - 1,
            pivot: last,
            threshold,
        });
    }
    Ok(())
}
