//! FitzHugh–Nagumo neuron model discretized by central differences.
//!
//! ```text
//! ε v_t = ε² v_xx + f(v) − w + c,   w_t = b v − γ w + c,   x ∈ [0, 1]
//! v_x(0, t) = −i₀(t),   v_x(1, t) = 0,   f(v) = v (v − 0.1)(1 − v)
//! ```
//!
//! Nodes include both end points; the Neumann conditions use ghost nodes.
//! The state is `(v₁..v_N, w₁..w_N)`.

use std::sync::Arc;

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;
use crate::mor::model::{FomModel, Mass, Nonlinearity, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FnParams {
    pub epsilon: f64,
    pub b: f64,
    pub gamma: f64,
    pub c: f64,
}

impl Default for FnParams {
    fn default() -> Self {
        FnParams {
            epsilon: 0.015,
            b: 0.5,
            gamma: 2.0,
            c: 0.05,
        }
    }
}

/// Stimulus current `i₀(t) = 50000 t³ e^{−15t}`.
pub fn fn_stimulus(t: f64) -> f64 {
    50000.0 * t.powi(3) * (-15.0 * t).exp()
}

pub fn fn_cubic(v: f64) -> f64 {
    v * (v - 0.1) * (1.0 - v)
}

/// The cubic acting on the `v` block; the `w` block has no nonlinearity.
#[derive(Clone, Debug)]
pub struct FnNonlinearity {
    n_half: usize,
}

impl Nonlinearity for FnNonlinearity {
    fn dim(&self) -> usize {
        2 * self.n_half
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let (v, _) = x.split_at(self.n_half);
        let (fv, fw) = out.split_at_mut(self.n_half);
        for (o, &vi) in fv.iter_mut().zip(v) {
            *o = fn_cubic(vi);
        }
        fw.iter_mut().for_each(|o| *o = 0.0);
    }

    fn reads(&self, i: usize) -> Vec<usize> {
        if i < self.n_half {
            vec![i]
        } else {
            Vec::new()
        }
    }

    fn eval_component(&self, i: usize, vals: &[f64]) -> f64 {
        if i < self.n_half {
            fn_cubic(vals[0])
        } else {
            0.0
        }
    }
}

pub fn build_fn_model(n_half: usize) -> Result<FomModel> {
    build_fn_model_with(n_half, FnParams::default())
}

pub fn build_fn_model_with(n_half: usize, p: FnParams) -> Result<FomModel> {
    if n_half < 8 {
        return Err(DeimError::InvalidArgument(format!(
            "n_half must be at least 8, got {n_half}"
        )));
    }
    let n = 2 * n_half;
    let h = 1.0 / (n_half - 1) as f64;
    let e2 = p.epsilon * p.epsilon;
    let diff = e2 / (h * h);

    let mut t = Vec::with_capacity(6 * n_half);
    for i in 0..n_half {
        t.push((i, i, -2.0 * diff));
        // Ghost nodes double the inward neighbour at both ends.
        if i == 0 {
            t.push((0, 1, 2.0 * diff));
        } else if i == n_half - 1 {
            t.push((i, i - 1, 2.0 * diff));
        } else {
            t.push((i, i - 1, diff));
            t.push((i, i + 1, diff));
        }
        t.push((i, n_half + i, -1.0));
        t.push((n_half + i, i, p.b));
        t.push((n_half + i, n_half + i, -p.gamma));
    }
    let lin = SparseMatrix::from_triplets(n, n, t);

    let mut input_map = Matrix::zeros(n, 2);
    input_map[(0, 0)] = e2 * 2.0 / h;
    input_map.col_mut(1).iter_mut().for_each(|v| *v = p.c);

    let mut mass = vec![1.0; n];
    mass[..n_half].iter_mut().for_each(|v| *v = p.epsilon);

    // Interleaving v_i and w_i keeps the implicit matrix within bandwidth 2.
    let ordering = (0..n_half).flat_map(|i| [i, n_half + i]).collect();

    Ok(FomModel {
        name: "fitzhugh-nagumo".into(),
        mass: Mass::Diagonal(mass),
        lin,
        input_map,
        nonlinearity: Arc::new(FnNonlinearity { n_half }),
        forcing: Arc::new(|t| vec![fn_stimulus(t), 1.0]),
        ordering: Some(ordering),
    })
}
