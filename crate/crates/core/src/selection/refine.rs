//! Volume post-processing of the trailing pair of Q-DEIM indices.

use crate::linalg::qr::PivotedQrFactor;
use crate::matrix::Matrix;
use crate::selection::SelectionOperator;

/// Replaces the last two selected indices by the column pair of
/// `R(m−1:m, m−1:n)` whose 2 × 2 determinant is largest, if that strictly
/// increases `|det U(℘,:)|`.
///
/// With the first `m−2` columns of `R` fixed, the selected volume factors as
/// `|det T(1:m−2,1:m−2)| · |det R(m−1:m, [p,q])|`.
pub fn refine_volume(
    u: &Matrix,
    sel: &SelectionOperator,
    qr: &PivotedQrFactor,
) -> SelectionOperator {
    let m = u.cols();
    let r = &qr.r_factor;
    if m < 2 || sel.len() != m || r.rows() < m || qr.perm[..m] != *sel.indices() {
        return sel.clone();
    }
    let (a, b) = (m - 2, m - 1);
    let n = r.cols();
    let det = |p: usize, q: usize| (r[(a, p)] * r[(b, q)] - r[(a, q)] * r[(b, p)]).abs();
    let current = det(a, b);
    let mut best = (current, a, b);
    for p in a..n {
        let (xp, yp) = (r[(a, p)], r[(b, p)]);
        if xp == 0.0 && yp == 0.0 {
            continue;
        }
        for q in p + 1..n {
            let d = (xp * r[(b, q)] - r[(a, q)] * yp).abs();
            if d > best.0 {
                best = (d, p, q);
            }
        }
    }
    if best.0 <= current * (1.0 + 1e-12) {
        return sel.clone();
    }
    let mut indices = sel.indices()[..a].to_vec();
    indices.push(qr.perm[best.1]);
    indices.push(qr.perm[best.2]);
    SelectionOperator::new(indices, sel.ambient_dim()).expect("pivot columns are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{determinant, haar_orthonormal};
    use crate::selection::{brute_force_volume_select, qdeim_factor};

    fn volume(u: &Matrix, sel: &SelectionOperator) -> f64 {
        determinant(&sel.apply_rows(u)).unwrap().abs()
    }

    #[test]
    fn never_decreases_volume() {
        for seed in 0..100 {
            let u = haar_orthonormal(100, 6, seed).unwrap();
            let (sel, qr) = qdeim_factor(&u).unwrap();
            let refined = refine_volume(&u, &sel, &qr);
            assert!(volume(&u, &refined) >= volume(&u, &sel) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn unchanged_when_already_optimal() {
        let mut hits = 0;
        for seed in 0..30 {
            let u = haar_orthonormal(7, 2, seed).unwrap();
            let (sel, qr) = qdeim_factor(&u).unwrap();
            let best = brute_force_volume_select(&u).unwrap();
            let mut a = sel.indices().to_vec();
            let mut b = best.indices().to_vec();
            a.sort();
            b.sort();
            if a == b {
                hits += 1;
                assert_eq!(refine_volume(&u, &sel, &qr), sel);
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn foreign_selection_is_returned_as_is() {
        let u = haar_orthonormal(20, 3, 2).unwrap();
        let (_, qr) = qdeim_factor(&u).unwrap();
        let other = SelectionOperator::new(vec![0, 1, 2], 20).unwrap();
        assert_eq!(refine_volume(&u, &other, &qr), other);
    }
}
