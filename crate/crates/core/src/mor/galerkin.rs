//! Galerkin projection of a full-order model, optionally with DEIM for the
//! nonlinear term.

use std::sync::Arc;

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;
use crate::mor::model::{validate_pattern, FomModel, Forcing, Nonlinearity};
use crate::projector::DeimProjector;
use crate::tol;

/// Data needed to evaluate `Vᵀ M f_℘(V x_r)` from `m` component evaluations.
#[derive(Clone, Debug)]
pub struct DeimRestriction {
    pub projector: DeimProjector,
    /// `Vᵀ U (SᵀU)⁻¹`, `r × m`.
    pub premultiplier: Matrix,
    /// Rows of `V` read by the selected components.
    pub sampled_rows: Vec<usize>,
    /// `V(sampled_rows, :)`.
    pub v_sampled: Matrix,
    /// For each selected component, positions of its reads in `sampled_rows`.
    reads: Vec<Vec<usize>>,
}

/// `E_r ẋ_r = A_r x_r + N_r(x_r) + B_r g(t)`.
#[derive(Clone)]
pub struct ReducedModel {
    pub basis: Matrix,
    pub mass_r: Matrix,
    pub lin_r: Matrix,
    pub input_r: Matrix,
    pub forcing: Forcing,
    pub nonlinearity: Arc<dyn Nonlinearity>,
    pub deim: Option<DeimRestriction>,
}

impl std::fmt::Debug for ReducedModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedModel")
            .field("n", &self.basis.rows())
            .field("r", &self.basis.cols())
            .field("deim", &self.deim.as_ref().map(|d| d.projector.rank()))
            .finish()
    }
}

impl ReducedModel {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn projector(&self) -> Option<&DeimProjector> {
        self.deim.as_ref().map(|d| &d.projector)
    }

    /// `V x_r`.
    pub fn lift(&self, x_r: &[f64]) -> Result<Vec<f64>> {
        self.basis.matvec(x_r)
    }
}

pub fn galerkin_reduce(
    fom: &FomModel,
    v: &Matrix,
    deim: Option<&DeimProjector>,
) -> Result<ReducedModel> {
    fom.check()?;
    let n = fom.dim();
    if v.rows() != n || v.cols() == 0 {
        return Err(DeimError::dims(
            "galerkin_reduce",
            format!("{n} x r"),
            format!("{}x{}", v.rows(), v.cols()),
        ));
    }
    let deviation = v.orthonormality_defect();
    if !(deviation <= tol::GALERKIN_ORTHO) {
        return Err(DeimError::NotOrthonormal { deviation });
    }

    let ev = {
        let mut out = Matrix::zeros(n, v.cols());
        for j in 0..v.cols() {
            let src = v.col(j).to_vec();
            fom.mass.apply(&src, out.col_mut(j));
        }
        out
    };
    let mass_r = v.tr_matmul(&ev)?;
    let lin_r = v.tr_matmul(&fom.lin.matmul_dense(v)?)?;
    let input_r = v.tr_matmul(&fom.input_map)?;

    let deim = match deim {
        None => None,
        Some(p) => Some(restrict(fom, v, p)?),
    };
    Ok(ReducedModel {
        basis: v.clone(),
        mass_r,
        lin_r,
        input_r,
        forcing: fom.forcing.clone(),
        nonlinearity: fom.nonlinearity.clone(),
        deim,
    })
}

fn restrict(fom: &FomModel, v: &Matrix, p: &DeimProjector) -> Result<DeimRestriction> {
    if p.dim() != fom.dim() {
        return Err(DeimError::dims(
            "galerkin_reduce (DEIM basis)",
            fom.dim(),
            p.dim(),
        ));
    }
    let sel = p.selection().indices();
    validate_pattern(fom.nonlinearity.as_ref(), sel, 0x5eed)?;

    let mut sampled_rows: Vec<usize> = sel
        .iter()
        .flat_map(|&i| fom.nonlinearity.reads(i))
        .collect();
    sampled_rows.sort_unstable();
    sampled_rows.dedup();
    let reads = sel
        .iter()
        .map(|&i| {
            fom.nonlinearity
                .reads(i)
                .iter()
                .map(|j| sampled_rows.binary_search(j).expect("read is sampled"))
                .collect()
        })
        .collect();
    Ok(DeimRestriction {
        projector: p.clone(),
        premultiplier: v.tr_matmul(p.interp_matrix())?,
        v_sampled: v.select_rows(&sampled_rows),
        sampled_rows,
        reads,
    })
}

/// `N_r(x_r)`: with DEIM, `Vᵀ M f_℘(V x_r)` evaluated from the sampled rows
/// only; otherwise the lifted `Vᵀ f(V x_r)`.
pub fn reduced_nonlinear_eval(rom: &ReducedModel, x_r: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; rom.rank()];
    reduced_nonlinear_into(rom, x_r, &mut out)?;
    Ok(out)
}

pub fn reduced_nonlinear_into(rom: &ReducedModel, x_r: &[f64], out: &mut [f64]) -> Result<()> {
    if x_r.len() != rom.rank() || out.len() != rom.rank() {
        return Err(DeimError::dims(
            "reduced_nonlinear_eval",
            rom.rank(),
            x_r.len(),
        ));
    }
    match &rom.deim {
        Some(d) => {
            let y = d.v_sampled.matvec(x_r)?;
            let sel = d.projector.selection().indices();
            let mut vals = Vec::new();
            let g: Vec<f64> = sel
                .iter()
                .zip(&d.reads)
                .map(|(&i, pos)| {
                    vals.clear();
                    vals.extend(pos.iter().map(|&p| y[p]));
                    rom.nonlinearity.eval_component(i, &vals)
                })
                .collect();
            let res = d.premultiplier.matvec(&g)?;
            out.copy_from_slice(&res);
        }
        None => {
            let x = rom.basis.matvec(x_r)?;
            let mut f = vec![0.0; x.len()];
            rom.nonlinearity.eval(&x, &mut f);
            out.copy_from_slice(&rom.basis.tr_matvec(&f)?);
        }
    }
    Ok(())
}
