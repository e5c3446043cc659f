//! End-to-end reduction experiments: simulate the full model, build POD and
//! DEIM bases, select indices, simulate the reduced model, measure errors.

use serde::{Deserialize, Serialize};

use crate::error::{DeimError, Result};
use crate::linalg::{thin_svd, ThinSvd};
use crate::matrix::{norm2, Matrix};
use crate::mor::fitzhugh::build_fn_model;
use crate::mor::galerkin::galerkin_reduce;
use crate::mor::integrate::{simulate, Trajectory};
use crate::mor::model::FomModel;
use crate::mor::rc::{build_rc_model_with_input, RcInput};
use crate::pod::{reconstruction_error, rowwise_relative_errors, RowErrors};
use crate::projector::build_projector;
use crate::selection::{deim_select, qdeim_select, Method, SelectionOperator};

/// Time-stepping setup of a full-order run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSetup {
    pub t_span: (f64, f64),
    pub n_steps: usize,
    pub snapshot_count: usize,
}

impl RunSetup {
    /// `[0, 8]`, 16000 steps, 100 snapshots.
    pub fn fitzhugh() -> Self {
        RunSetup {
            t_span: (0.0, 8.0),
            n_steps: 16_000,
            snapshot_count: 100,
        }
    }

    /// `[0, 7]`, 14000 steps, 1425 snapshots.
    pub fn rc() -> Self {
        RunSetup {
            t_span: (0.0, 7.0),
            n_steps: 14_000,
            snapshot_count: 1425,
        }
    }

    /// [`RunSetup::rc`] with enough steps to resolve the input: the 1 kHz
    /// sine would be sampled at its zeros by the default step.
    pub fn rc_for(input: RcInput) -> Self {
        let mut s = RunSetup::rc();
        if input == RcInput::Sin1000 {
            s.n_steps = 140_000;
        }
        s
    }
}

/// Full-order trajectory with the SVDs of its state and nonlinear snapshots.
pub struct FullRun {
    pub fom: FomModel,
    pub setup: RunSetup,
    pub trajectory: Trajectory,
    pub state_svd: ThinSvd,
    pub nonlinear_svd: ThinSvd,
}

impl FullRun {
    pub fn new(fom: FomModel, setup: RunSetup) -> Result<FullRun> {
        let x0 = vec![0.0; fom.dim()];
        let trajectory = simulate(&fom, setup.t_span, setup.n_steps, &x0, setup.snapshot_count)?;
        let state_svd = thin_svd(&trajectory.states.matrix)?;
        let nonlinear_svd = thin_svd(&trajectory.nonlinear)?;
        Ok(FullRun {
            fom,
            setup,
            trajectory,
            state_svd,
            nonlinear_svd,
        })
    }

    /// Leading `r` POD vectors of the states.
    pub fn state_basis(&self, r: usize) -> Result<Matrix> {
        leading(&self.state_svd, r)
    }

    /// Leading `m` POD vectors of the nonlinear snapshots.
    pub fn nonlinear_basis(&self, m: usize) -> Result<Matrix> {
        leading(&self.nonlinear_svd, m)
    }
}

fn leading(svd: &ThinSvd, k: usize) -> Result<Matrix> {
    if k == 0 || k > svd.sigma.len() {
        return Err(DeimError::InvalidArgument(format!(
            "basis size {k} outside 1..={}",
            svd.sigma.len()
        )));
    }
    Ok(svd.z.leading_cols(k))
}

pub fn fn_full_run() -> Result<FullRun> {
    FullRun::new(build_fn_model(1024)?, RunSetup::fitzhugh())
}

pub fn rc_full_run(input: RcInput) -> Result<FullRun> {
    FullRun::new(
        build_rc_model_with_input(1000, input)?,
        RunSetup::rc_for(input),
    )
}

/// Selection by DEIM or Q-DEIM (the deterministic methods used for reduction).
pub fn select_for_reduction(u: &Matrix, method: Method) -> Result<SelectionOperator> {
    match method {
        Method::Deim => deim_select(u),
        Method::Qdeim => qdeim_select(u),
        Method::Lu => crate::selection::lu_pp_select(u),
        other => Err(DeimError::InvalidArgument(format!(
            "method {other} is not supported in the reduction pipeline"
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub method: Method,
    pub r: usize,
    pub m: usize,
    pub selection: SelectionOperator,
    pub c: f64,
    /// `‖X − V X_r‖_F / ‖X‖_F`.
    pub epsilon: f64,
    pub row_errors: RowErrors,
    /// Relative error in the first state component over the snapshot times.
    pub xi1_error: f64,
    /// First state component of the full and of the lifted reduced run.
    pub xi1_full: Vec<f64>,
    pub xi1_reduced: Vec<f64>,
}

pub fn reduce_and_compare(
    full: &FullRun,
    r: usize,
    m: usize,
    method: Method,
) -> Result<ReductionOutcome> {
    let v = full.state_basis(r)?;
    let u = full.nonlinear_basis(m)?;
    let sel = select_for_reduction(&u, method)?;
    let proj = build_projector(&u, &sel)?;
    let rom = galerkin_reduce(&full.fom, &v, Some(&proj))?;
    let x0 = vec![0.0; r];
    let setup = &full.setup;
    let red = simulate(&rom, setup.t_span, setup.n_steps, &x0, setup.snapshot_count)?;

    let x = &full.trajectory.states.matrix;
    let lifted = v.matmul(&red.states.matrix)?;
    let epsilon = reconstruction_error(x, &v, &red.states.matrix)?;
    let row_errors = rowwise_relative_errors(x, &lifted)?;
    let xi1_full = x.row(0);
    let xi1_reduced = lifted.row(0);
    let diff: Vec<f64> = xi1_full
        .iter()
        .zip(&xi1_reduced)
        .map(|(a, b)| a - b)
        .collect();
    let xi1_error = norm2(&diff) / norm2(&xi1_full);
    Ok(ReductionOutcome {
        method,
        r,
        m,
        c: proj.c(),
        selection: sel,
        epsilon,
        row_errors,
        xi1_error,
        xi1_full,
        xi1_reduced,
    })
}
