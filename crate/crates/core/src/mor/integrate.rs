//! Fixed-step IMEX Euler: `(E − dt A) x_{k+1} = E x_k + dt (f(x_k) + B g(t_k))`.

use crate::error::{DeimError, Result};
use crate::linalg::{BandedLu, DenseLu};
use crate::matrix::Matrix;
use crate::mor::galerkin::{reduced_nonlinear_into, ReducedModel};
use crate::mor::model::FomModel;
use crate::pod::SnapshotSet;

/// A system the IMEX stepper can advance.
pub trait ImexSystem {
    fn dim(&self) -> usize;

    /// `out = E x + dt (N(x) + B g(t))`.
    fn explicit_part(&self, t: f64, dt: f64, x: &[f64], out: &mut [f64]) -> Result<()>;

    /// Factorization of `E − dt A`.
    fn implicit_solver(&self, dt: f64) -> Result<ImplicitSolver>;

    /// The nonlinear term `N(x)` alone.
    fn nonlinear(&self, x: &[f64], out: &mut [f64]) -> Result<()>;
}

pub enum ImplicitSolver {
    Banded {
        lu: BandedLu,
        ordering: Option<Vec<usize>>,
    },
    Dense(DenseLu),
}

impl ImplicitSolver {
    fn solve(&self, rhs: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        match self {
            ImplicitSolver::Banded { lu, ordering: None } => {
                lu.solve_in_place(rhs);
                Ok(())
            }
            ImplicitSolver::Banded {
                lu,
                ordering: Some(ord),
            } => {
                for (k, &i) in ord.iter().enumerate() {
                    scratch[k] = rhs[i];
                }
                lu.solve_in_place(scratch);
                for (k, &i) in ord.iter().enumerate() {
                    rhs[i] = scratch[k];
                }
                Ok(())
            }
            ImplicitSolver::Dense(lu) => lu.solve_in_place(rhs),
        }
    }
}

fn add_input(b: &Matrix, g: &[f64], dt: f64, out: &mut [f64]) {
    for (j, &gj) in g.iter().enumerate() {
        if gj != 0.0 {
            for (o, bij) in out.iter_mut().zip(b.col(j)) {
                *o += dt * gj * bij;
            }
        }
    }
}

impl ImexSystem for FomModel {
    fn dim(&self) -> usize {
        FomModel::dim(self)
    }

    fn explicit_part(&self, t: f64, dt: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        let n = x.len();
        let mut f = vec![0.0; n];
        self.nonlinearity.eval(x, &mut f);
        self.mass.apply(x, out);
        for (o, fi) in out.iter_mut().zip(&f) {
            *o += dt * fi;
        }
        add_input(&self.input_map, &(self.forcing)(t), dt, out);
        Ok(())
    }

    fn implicit_solver(&self, dt: f64) -> Result<ImplicitSolver> {
        let n = FomModel::dim(self);
        let mut entries = self.mass.triplets();
        entries.extend(self.lin.triplets().map(|(i, j, v)| (i, j, -dt * v)));
        let ordering = self.ordering.clone();
        if let Some(ord) = &ordering {
            let mut pos = vec![0; n];
            for (k, &i) in ord.iter().enumerate() {
                pos[i] = k;
            }
            for e in &mut entries {
                *e = (pos[e.0], pos[e.1], e.2);
            }
        }
        Ok(ImplicitSolver::Banded {
            lu: BandedLu::factor(n, &entries)?,
            ordering,
        })
    }

    fn nonlinear(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.nonlinearity.eval(x, out);
        Ok(())
    }
}

impl ImexSystem for ReducedModel {
    fn dim(&self) -> usize {
        self.rank()
    }

    fn explicit_part(&self, t: f64, dt: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        let mut nl = vec![0.0; x.len()];
        reduced_nonlinear_into(self, x, &mut nl)?;
        let ex = self.mass_r.matvec(x)?;
        for ((o, e), f) in out.iter_mut().zip(&ex).zip(&nl) {
            *o = e + dt * f;
        }
        add_input(&self.input_r, &(self.forcing)(t), dt, out);
        Ok(())
    }

    fn implicit_solver(&self, dt: f64) -> Result<ImplicitSolver> {
        let r = self.rank();
        let a = Matrix::from_fn(r, r, |i, j| self.mass_r[(i, j)] - dt * self.lin_r[(i, j)]);
        Ok(ImplicitSolver::Dense(DenseLu::factor(&a)?))
    }

    fn nonlinear(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        reduced_nonlinear_into(self, x, out)
    }
}

/// Captured states and nonlinear terms at the snapshot instants.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: SnapshotSet,
    pub nonlinear: Matrix,
    pub dt: f64,
    /// Step index of each snapshot.
    pub steps: Vec<usize>,
}

/// Step indices nearest to `count` equally spaced instants over `n_steps` steps.
pub fn snapshot_steps(n_steps: usize, count: usize) -> Vec<usize> {
    (0..count)
        .map(|s| ((s as f64) * n_steps as f64 / (count - 1) as f64).round() as usize)
        .collect()
}

pub fn simulate<S: ImexSystem + ?Sized>(
    sys: &S,
    t_span: (f64, f64),
    n_steps: usize,
    x0: &[f64],
    snapshot_count: usize,
) -> Result<Trajectory> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(DeimError::dims("simulate", n, x0.len()));
    }
    if snapshot_count < 2 || n_steps < snapshot_count {
        return Err(DeimError::InvalidArgument(format!(
            "need n_steps >= snapshot_count >= 2 (got {n_steps}, {snapshot_count})"
        )));
    }
    let (t0, t1) = t_span;
    let dt = (t1 - t0) / n_steps as f64;
    let solver = sys.implicit_solver(dt)?;
    let steps = snapshot_steps(n_steps, snapshot_count);

    let mut states = Matrix::zeros(n, snapshot_count);
    let mut nonlinear = Matrix::zeros(n, snapshot_count);
    let mut coords = Vec::with_capacity(snapshot_count);
    let mut x = x0.to_vec();
    let mut rhs = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut next = 0;
    for k in 0..=n_steps {
        let t = t0 + k as f64 * dt;
        while next < steps.len() && steps[next] == k {
            states.col_mut(next).copy_from_slice(&x);
            sys.nonlinear(&x, nonlinear.col_mut(next))?;
            if nonlinear.col(next).iter().any(|v| !v.is_finite()) {
                return Err(DeimError::IntegrationBlowup { time: t });
            }
            coords.push(t);
            next += 1;
        }
        if k == n_steps {
            break;
        }
        sys.explicit_part(t, dt, &x, &mut rhs)?;
        solver.solve(&mut rhs, &mut scratch)?;
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(DeimError::IntegrationBlowup { time: t + dt });
        }
        std::mem::swap(&mut x, &mut rhs);
    }
    Ok(Trajectory {
        states: SnapshotSet::new(states, coords)?,
        nonlinear,
        dt,
        steps,
    })
}
