//! Nonlinear RC ladder: unit resistors and capacitors, each resistor in
//! parallel with a diode `i_D = e^{40 v} − 1`, current source into node 1.
//!
//! With `g(v) = e^{40v} + v − 1` the node equations are
//!
//! ```text
//! ẋ₁ = −g(x₁) − g(x₁ − x₂) + u(t)
//! ẋⱼ = g(xⱼ₋₁ − xⱼ) − g(xⱼ − xⱼ₊₁)
//! ẋₙ = g(xₙ₋₁ − xₙ)
//! ```
//!
//! The resistor part of `g` is kept in the linear operator; the diode part
//! forms the nonlinearity.

use std::sync::Arc;

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;
use crate::mor::model::{FomModel, Mass, Nonlinearity, SparseMatrix};

pub fn diode(v: f64) -> f64 {
    (40.0 * v).exp_m1()
}

#[derive(Clone, Debug)]
pub struct RcNonlinearity {
    n: usize,
}

impl Nonlinearity for RcNonlinearity {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        // Branch currents: branch 0 is node 1 to ground, branch j joins j−1 and j.
        let mut prev = diode(x[0]);
        for j in 0..n {
            let next = if j + 1 < n {
                diode(x[j] - x[j + 1])
            } else {
                0.0
            };
            out[j] = if j == 0 { -prev - next } else { prev - next };
            prev = next;
        }
    }

    fn reads(&self, i: usize) -> Vec<usize> {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(self.n - 1);
        (lo..=hi).collect()
    }

    fn eval_component(&self, i: usize, vals: &[f64]) -> f64 {
        let n = self.n;
        if i == 0 {
            -diode(vals[0]) - diode(vals[0] - vals[1])
        } else if i == n - 1 {
            diode(vals[0] - vals[1])
        } else {
            diode(vals[0] - vals[1]) - diode(vals[1] - vals[2])
        }
    }
}

/// Input signals used with the ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcInput {
    /// `e^{−t}`
    Exp,
    /// `sin(2π·50 t)`
    Sin50,
    /// `sin(2π·1000 t)`
    Sin1000,
}

impl RcInput {
    pub fn eval(self, t: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            RcInput::Exp => (-t).exp(),
            RcInput::Sin50 => (2.0 * PI * 50.0 * t).sin(),
            RcInput::Sin1000 => (2.0 * PI * 1000.0 * t).sin(),
        }
    }
}

pub fn build_rc_model(n: usize) -> Result<FomModel> {
    build_rc_model_with_input(n, RcInput::Exp)
}

pub fn build_rc_model_with_input(n: usize, input: RcInput) -> Result<FomModel> {
    if n < 3 {
        return Err(DeimError::InvalidArgument(format!(
            "RC ladder needs n >= 3, got {n}"
        )));
    }
    let mut t = Vec::with_capacity(3 * n);
    t.push((0, 0, -2.0));
    t.push((0, 1, 1.0));
    for j in 1..n - 1 {
        t.push((j, j - 1, 1.0));
        t.push((j, j, -2.0));
        t.push((j, j + 1, 1.0));
    }
    t.push((n - 1, n - 2, 1.0));
    t.push((n - 1, n - 1, -1.0));
    let mut input_map = Matrix::zeros(n, 1);
    input_map[(0, 0)] = 1.0;
    Ok(FomModel {
        name: "rc-ladder".into(),
        mass: Mass::Identity(n),
        lin: SparseMatrix::from_triplets(n, n, t),
        input_map,
        nonlinearity: Arc::new(RcNonlinearity { n }),
        forcing: Arc::new(move |s| vec![input.eval(s)]),
        ordering: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mor::model::validate_pattern;

    #[test]
    fn pattern_is_tridiagonal() {
        let m = build_rc_model(30).unwrap();
        m.check().unwrap();
        let all: Vec<usize> = (0..30).collect();
        validate_pattern(m.nonlinearity.as_ref(), &all, 2).unwrap();
    }

    #[test]
    fn zero_is_an_equilibrium() {
        let m = build_rc_model(10).unwrap();
        let mut out = vec![1.0; 10];
        m.nonlinearity.eval(&[0.0; 10], &mut out);
        assert_eq!(out, vec![0.0; 10]);
    }

    #[test]
    fn full_g_matches_node_equations() {
        // Recombine A x + f(x) and compare with g(v) = e^{40v} + v − 1 directly.
        let n = 5;
        let m = build_rc_model(n).unwrap();
        let x = [0.01, -0.02, 0.015, 0.0, 0.03];
        let g = |v: f64| (40.0 * v).exp() + v - 1.0;
        let mut lin = vec![0.0; n];
        m.lin.matvec_into(&x, &mut lin);
        let mut f = vec![0.0; n];
        m.nonlinearity.eval(&x, &mut f);
        let expect = [
            -g(x[0]) - g(x[0] - x[1]),
            g(x[0] - x[1]) - g(x[1] - x[2]),
            g(x[1] - x[2]) - g(x[2] - x[3]),
            g(x[2] - x[3]) - g(x[3] - x[4]),
            g(x[3] - x[4]),
        ];
        for i in 0..n {
            assert!((lin[i] + f[i] - expect[i]).abs() < 1e-14);
        }
    }
}
