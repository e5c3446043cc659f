//! The oblique interpolatory projector `f ↦ U (SᵀU)⁻¹ Sᵀ f`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DeimError, Result};
use crate::io::write_matrix;
use crate::linalg::qr::{householder_qr, PivotedQrFactor};
use crate::linalg::{smallest_singular_value, solve_upper_in_place};
use crate::matrix::{norm2, Matrix};
use crate::selection::SelectionOperator;

/// Interpolation matrix `M = U (SᵀU)⁻¹` with its selection and `c = ‖(SᵀU)⁻¹‖₂`.
#[derive(Clone, Debug)]
pub struct DeimProjector {
    basis: Matrix,
    selection: SelectionOperator,
    interp_matrix: Matrix,
    t_factor: Matrix,
    c: f64,
}

/// Builds `M` from an unpivoted QR of `U(℘,:)ᵀ`.
pub fn build_projector(u: &Matrix, sel: &SelectionOperator) -> Result<DeimProjector> {
    let (n, m) = u.shape();
    if sel.ambient_dim() != n || sel.len() != m {
        return Err(DeimError::dims(
            "build_projector",
            format!("{m} indices in 1..={n}"),
            format!("{} indices in 1..={}", sel.len(), sel.ambient_dim()),
        ));
    }
    u.ensure_finite()?;
    let w1 = sel.apply_rows(u).transpose();
    let qr = householder_qr(&w1)?;
    let t = qr.triangle(m);
    let rest = complement(sel);
    // K = Qᵀ W₂, where W₂ holds the unselected columns of Uᵀ.
    let mut k = Matrix::zeros(m, rest.len());
    for (c, &i) in rest.iter().enumerate() {
        let col = k.col_mut(c);
        for (j, v) in col.iter_mut().enumerate() {
            *v = u[(i, j)];
        }
        for h in &qr.reflectors {
            h.apply(col);
        }
    }
    assemble(u, sel, t, k, &rest)
}

/// Builds `M` directly from a column-pivoted factorization `Uᵀ Π = Q [T K]`
/// whose leading `m` pivots are the selection.
pub fn build_projector_from_factor(u: &Matrix, qr: &PivotedQrFactor) -> Result<DeimProjector> {
    let (n, m) = u.shape();
    if qr.r_factor.shape() != (m, n) {
        return Err(DeimError::dims(
            "build_projector_from_factor",
            format!("{m}x{n}"),
            format!("{:?}", qr.r_factor.shape()),
        ));
    }
    let sel = SelectionOperator::new(qr.perm[..m].to_vec(), n)?;
    let t = qr.leading_triangle(m);
    let k = qr.r_factor.block(0, m, m, n);
    let rest = qr.perm[m..].to_vec();
    assemble(u, &sel, t, k, &rest)
}

fn complement(sel: &SelectionOperator) -> Vec<usize> {
    let mut chosen = vec![false; sel.ambient_dim()];
    for &i in sel.indices() {
        chosen[i] = true;
    }
    (0..sel.ambient_dim()).filter(|&i| !chosen[i]).collect()
}

/// `M = Π [I_m ; (T⁻¹K)ᵀ]` with `T⁻¹K = T̆⁻¹ (D⁻¹ K)`, `T = D T̆`, `D = diag(T)`.
fn assemble(
    u: &Matrix,
    sel: &SelectionOperator,
    t: Matrix,
    mut k: Matrix,
    rest: &[usize],
) -> Result<DeimProjector> {
    let (n, m) = u.shape();
    let singular = || DeimError::SingularSelection {
        indices: sel.one_based(),
    };
    let d: Vec<f64> = (0..m).map(|i| t[(i, i)]).collect();
    if d.iter().any(|&x| x == 0.0) {
        return Err(singular());
    }
    let t_unit = Matrix::from_fn(m, m, |i, j| if i <= j { t[(i, j)] / d[i] } else { 0.0 });
    for c in 0..k.cols() {
        let col = k.col_mut(c);
        for (v, di) in col.iter_mut().zip(&d) {
            *v /= di;
        }
        solve_upper_in_place(&t_unit, col).map_err(|_| singular())?;
    }
    let sigma_min = smallest_singular_value(&t)?;
    if !(sigma_min > 0.0) || k.find_non_finite().is_some() {
        return Err(singular());
    }

    let mut interp = Matrix::zeros(n, m);
    for (j, &i) in sel.indices().iter().enumerate() {
        interp[(i, j)] = 1.0;
    }
    for (c, &i) in rest.iter().enumerate() {
        for j in 0..m {
            interp[(i, j)] = k[(j, c)];
        }
    }
    Ok(DeimProjector {
        basis: u.clone(),
        selection: sel.clone(),
        interp_matrix: interp,
        t_factor: t,
        c: 1.0 / sigma_min,
    })
}

/// Manifest written next to an exported projector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorManifest {
    pub n: usize,
    pub m: usize,
    /// 1-based.
    pub indices: Vec<usize>,
    pub c: f64,
    pub basis_file: String,
    pub interp_file: String,
}

impl DeimProjector {
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn selection(&self) -> &SelectionOperator {
        &self.selection
    }

    pub fn interp_matrix(&self) -> &Matrix {
        &self.interp_matrix
    }

    /// Triangular factor `T` of `U(℘,:)ᵀ`.
    pub fn t_factor(&self) -> &Matrix {
        &self.t_factor
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// `M · sampled`, where `sampled = Sᵀf` has length `m`.
    pub fn apply_sampled(&self, sampled: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.interp_matrix.matvec(sampled)?;
        for (j, &i) in self.selection.indices().iter().enumerate() {
            out[i] = sampled[j];
        }
        Ok(out)
    }

    /// `f̂ = M Sᵀ f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.dim() {
            return Err(DeimError::dims("DeimProjector::apply", self.dim(), f.len()));
        }
        self.apply_sampled(&self.selection.gather(f))
    }

    /// `(‖f − f̂‖₂, ‖(I − UUᵀ) f‖₂, c · ‖(I − UUᵀ) f‖₂)`; the second entry
    /// assumes orthonormal columns of `U`.
    pub fn error_split(&self, f: &[f64]) -> Result<(f64, f64, f64)> {
        let fhat = self.apply(f)?;
        let diff: Vec<f64> = f.iter().zip(&fhat).map(|(a, b)| a - b).collect();
        let coef = self.basis.tr_matvec(f)?;
        let proj = self.basis.matvec(&coef)?;
        let resid: Vec<f64> = f.iter().zip(&proj).map(|(a, b)| a - b).collect();
        let orth = norm2(&resid);
        Ok((norm2(&diff), orth, self.c * orth))
    }

    /// Writes `basis.mtx`, `interp.mtx` and `projector.json` into `dir`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<ProjectorManifest> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_matrix(dir.join("basis.mtx"), &self.basis)?;
        write_matrix(dir.join("interp.mtx"), &self.interp_matrix)?;
        let manifest = ProjectorManifest {
            n: self.dim(),
            m: self.rank(),
            indices: self.selection.one_based(),
            c: self.c,
            basis_file: "basis.mtx".into(),
            interp_file: "interp.mtx".into(),
        };
        fs::write(
            dir.join("projector.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_orthonormal;
    use crate::selection::{condition_of, deim_select, qdeim_factor, qdeim_select};

    fn random_vec(n: usize, seed: u64) -> Vec<f64> {
        haar_orthonormal(n, 1, seed).unwrap().into_vec()
    }

    #[test]
    fn identity_columns_give_m_equal_u() {
        let u = Matrix::identity(6).select_cols(&[1, 4]);
        let sel = SelectionOperator::new(vec![1, 4], 6).unwrap();
        let p = build_projector(&u, &sel).unwrap();
        assert_eq!(p.interp_matrix(), &u);
        assert!((p.c() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interpolation_is_exact_on_selected_rows() {
        let u = haar_orthonormal(120, 7, 3).unwrap();
        let sel = deim_select(&u).unwrap();
        let p = build_projector(&u, &sel).unwrap();
        let f = random_vec(120, 9);
        let fhat = p.apply(&f).unwrap();
        for &i in sel.indices() {
            assert_eq!(fhat[i], f[i]);
        }
    }

    #[test]
    fn reproduces_range_and_is_idempotent() {
        let u = haar_orthonormal(80, 5, 1).unwrap();
        let p = build_projector(&u, &qdeim_select(&u).unwrap()).unwrap();
        let back = p
            .interp_matrix()
            .matmul(&p.selection().apply_rows(&u))
            .unwrap();
        assert!(back.sub(&u).unwrap().max_abs() <= 1e-11);
        let f = random_vec(80, 4);
        let once = p.apply(&f).unwrap();
        let twice = p.apply(&once).unwrap();
        let d: f64 = once
            .iter()
            .zip(&twice)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(d <= 1e-10);
    }

    #[test]
    fn factor_path_agrees_with_generic_path() {
        let u = haar_orthonormal(60, 6, 2).unwrap();
        let (sel, qr) = qdeim_factor(&u).unwrap();
        let a = build_projector_from_factor(&u, &qr).unwrap();
        let b = build_projector(&u, &sel).unwrap();
        assert_eq!(a.selection(), b.selection());
        assert!(a.interp_matrix().sub(b.interp_matrix()).unwrap().max_abs() < 1e-11);
        let c = condition_of(&u, &sel).unwrap();
        assert!((a.c() - c).abs() <= 1e-11 * c);
        assert!((b.c() - c).abs() <= 1e-11 * c);
    }

    #[test]
    fn singular_selection_names_indices() {
        let mut u = Matrix::zeros(4, 2);
        u[(0, 0)] = 1.0;
        u[(1, 0)] = 1.0;
        u[(2, 1)] = 1.0;
        let sel = SelectionOperator::new(vec![0, 1], 4).unwrap();
        match build_projector(&u, &sel) {
            Err(DeimError::SingularSelection { indices }) => assert_eq!(indices, vec![1, 2]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orthogonal_unsampled_input_maps_to_zero() {
        let u = Matrix::identity(5).select_cols(&[0, 1]);
        let p = build_projector(&u, &SelectionOperator::new(vec![0, 1], 5).unwrap()).unwrap();
        assert_eq!(p.apply(&[0.0, 0.0, 3.0, -1.0, 2.0]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn export_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let u = haar_orthonormal(10, 2, 5).unwrap();
        let p = build_projector(&u, &qdeim_select(&u).unwrap()).unwrap();
        let man = p.export(dir.path()).unwrap();
        assert_eq!(man.indices, p.selection().one_based());
        let back = crate::io::read_matrix(dir.path().join("interp.mtx")).unwrap();
        assert_eq!(&back, p.interp_matrix());
    }
}
