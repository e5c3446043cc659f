//! Greedy DEIM and its row-pivoted LU counterpart.

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;
use crate::selection::{check_basis, SelectionOperator};
use crate::tol;

/// Index of the largest `|x_i|` among rows not yet taken; smallest index on ties.
fn argmax_free(x: &[f64], taken: &[bool]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in x.iter().enumerate() {
        if taken[i] {
            continue;
        }
        let a = v.abs();
        match best {
            Some((_, b)) if a <= b => {}
            _ => best = Some((i, a)),
        }
    }
    best
}

/// Classical greedy DEIM selection.
///
/// The `j × j` systems `S_jᵀ U_j z = S_jᵀ u_{j+1}` are solved with an LU of
/// `S_jᵀ U_j` that is bordered by one row and column per step.
pub fn deim_select(u: &Matrix) -> Result<SelectionOperator> {
    check_basis(u, "deim_select")?;
    let (n, m) = u.shape();
    let mut taken = vec![false; n];
    let mut picks: Vec<usize> = Vec::with_capacity(m);
    // Packed factors of S_jᵀ U_j: lower[j] holds row j of L (unit diagonal
    // omitted), upper[j] holds column j of U (diagonal included).
    let mut lower: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut upper: Vec<Vec<f64>> = Vec::with_capacity(m);

    for j in 0..m {
        let uj = u.col(j);
        let scale = uj.iter().fold(0.0_f64, |a, v| a.max(v.abs()));

        // y = L⁻¹ Sᵀu_j, z = U⁻¹ y.
        let mut y: Vec<f64> = picks.iter().map(|&p| uj[p]).collect();
        for i in 0..j {
            let s: f64 = lower[i].iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
            y[i] -= s;
        }
        let mut z = y.clone();
        for i in (0..j).rev() {
            z[i] /= upper[i][i];
            let zi = z[i];
            for (zk, uk) in z[..i].iter_mut().zip(&upper[i][..i]) {
                *zk -= zi * uk;
            }
        }

        let mut r = uj.to_vec();
        for (k, &zk) in z.iter().enumerate() {
            if zk != 0.0 {
                for (ri, ui) in r.iter_mut().zip(u.col(k)) {
                    *ri -= zk * ui;
                }
            }
        }

        let (p, mag) = argmax_free(&r, &taken).ok_or(DeimError::DependentBasis { step: j })?;
        if mag == 0.0 || mag <= n as f64 * tol::EPS * scale {
            return Err(DeimError::DependentBasis { step: j });
        }

        // Border the factorization with row p and column j.
        let b: Vec<f64> = (0..j).map(|k| u[(p, k)]).collect();
        let mut l = b;
        for i in 0..j {
            let s: f64 = (0..i).map(|k| upper[i][k] * l[k]).sum();
            l[i] = (l[i] - s) / upper[i][i];
        }
        let eta = uj[p] - l.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        let mut col = y;
        col.push(eta);
        upper.push(col);
        lower.push(l);

        taken[p] = true;
        picks.push(p);
    }
    SelectionOperator::new(picks, n)
}

/// Gaussian elimination with partial (row) pivoting; returns the pivot rows
/// in elimination order. Ties go to the smallest row index.
pub fn lu_pp_select(u: &Matrix) -> Result<SelectionOperator> {
    check_basis(u, "lu_pp_select")?;
    let (n, m) = u.shape();
    let mut a = u.clone();
    let mut taken = vec![false; n];
    let mut picks = Vec::with_capacity(m);
    let scale = u.max_abs();
    for j in 0..m {
        let (p, mag) = argmax_free(a.col(j), &taken).ok_or(DeimError::RankDeficient {
            index: j,
            pivot: 0.0,
            threshold: 0.0,
        })?;
        let threshold = n as f64 * tol::EPS * scale;
        if mag == 0.0 || mag <= threshold {
            return Err(DeimError::RankDeficient {
                index: j,
                pivot: mag,
                threshold,
            });
        }
        taken[p] = true;
        picks.push(p);
        let piv = a[(p, j)];
        let factors: Vec<f64> = (0..n)
            .map(|i| if taken[i] { 0.0 } else { a[(i, j)] / piv })
            .collect();
        for k in j + 1..m {
            let apk = a[(p, k)];
            if apk == 0.0 {
                continue;
            }
            let col = a.col_mut(k);
            for (ci, &f) in col.iter_mut().zip(&factors) {
                if f != 0.0 {
                    *ci -= f * apk;
                }
            }
        }
    }
    SelectionOperator::new(picks, n)
}
