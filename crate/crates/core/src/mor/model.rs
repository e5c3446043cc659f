//! Full-order model description: `E ẋ = A x + f(x) + B g(t)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;

/// Componentwise-evaluable nonlinearity with a declared sparsity pattern.
pub trait Nonlinearity: Send + Sync {
    fn dim(&self) -> usize;

    /// `out = f(x)`.
    fn eval(&self, x: &[f64], out: &mut [f64]);

    /// Coordinates read by component `i`, in the order expected by
    /// [`Nonlinearity::eval_component`].
    fn reads(&self, i: usize) -> Vec<usize>;

    /// `f_i(x)` given `vals[k] = x[reads(i)[k]]`.
    fn eval_component(&self, i: usize, vals: &[f64]) -> f64;
}

/// Checks by probing that every coordinate influencing component `i` of `f`
/// (for `i` in `components`) is listed in `reads(i)`, and that the
/// componentwise evaluation agrees with the full one.
pub fn validate_pattern(f: &dyn Nonlinearity, components: &[usize], seed: u64) -> Result<()> {
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(-0.05..0.05)).collect();
    let mut f0 = vec![0.0; n];
    f.eval(&base, &mut f0);

    let reads: Vec<Vec<usize>> = components.iter().map(|&i| f.reads(i)).collect();
    for (&i, r) in components.iter().zip(&reads) {
        let vals: Vec<f64> = r.iter().map(|&j| base[j]).collect();
        let direct = f.eval_component(i, &vals);
        if (direct - f0[i]).abs() > 1e-12 * f0[i].abs().max(1.0) {
            return Err(DeimError::InvalidArgument(format!(
                "component {i}: eval_component disagrees with eval ({direct} vs {})",
                f0[i]
            )));
        }
    }

    let mut x = base.clone();
    let mut f1 = vec![0.0; n];
    for j in 0..n {
        x[j] = base[j] + 0.03;
        f.eval(&x, &mut f1);
        x[j] = base[j];
        for (&i, r) in components.iter().zip(&reads) {
            if f1[i] != f0[i] && !r.contains(&j) {
                return Err(DeimError::PatternViolation {
                    component: i,
                    coordinate: j,
                });
            }
        }
    }
    Ok(())
}

/// Compressed sparse rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Duplicate entries are summed.
    pub fn from_triplets(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            assert!(
                i < rows && j < cols,
                "triplet ({i}, {j}) outside {rows}x{cols}"
            );
            if last == Some((i, j)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
            last = Some((i, j));
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.rows {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            out[i] = s;
        }
    }

    /// `A V` for dense `V`.
    pub fn matmul_dense(&self, v: &Matrix) -> Result<Matrix> {
        if v.rows() != self.cols {
            return Err(DeimError::dims(
                "SparseMatrix::matmul_dense",
                self.cols,
                v.rows(),
            ));
        }
        let mut out = Matrix::zeros(self.rows, v.cols());
        for c in 0..v.cols() {
            let (src, dst) = (v.col(c).to_vec(), out.col_mut(c));
            self.matvec_into(&src, dst);
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut a = Matrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            a[(i, j)] += v;
        }
        a
    }
}

/// Mass matrix `E`.
#[derive(Clone, Debug, PartialEq)]
pub enum Mass {
    Identity(usize),
    Diagonal(Vec<f64>),
    Dense(Matrix),
}

impl Mass {
    pub fn dim(&self) -> usize {
        match self {
            Mass::Identity(n) => *n,
            Mass::Diagonal(d) => d.len(),
            Mass::Dense(m) => m.rows(),
        }
    }

    /// `out = E x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Mass::Identity(_) => out.copy_from_slice(x),
            Mass::Diagonal(d) => {
                for ((o, di), xi) in out.iter_mut().zip(d).zip(x) {
                    *o = di * xi;
                }
            }
            Mass::Dense(m) => {
                let y = m.matvec(x).expect("conformal mass matrix");
                out.copy_from_slice(&y);
            }
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        match self {
            Mass::Identity(n) => (0..*n).map(|i| (i, i, 1.0)).collect(),
            Mass::Diagonal(d) => d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
            Mass::Dense(m) => {
                let mut t = Vec::new();
                for j in 0..m.cols() {
                    for i in 0..m.rows() {
                        if m[(i, j)] != 0.0 {
                            t.push((i, j, m[(i, j)]));
                        }
                    }
                }
                t
            }
        }
    }

    pub fn to_dense(&self) -> Matrix {
        match self {
            Mass::Identity(n) => Matrix::identity(*n),
            Mass::Diagonal(d) => Matrix::diag(d),
            Mass::Dense(m) => m.clone(),
        }
    }
}

pub type Forcing = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// `E ẋ = A x + f(x) + B g(t)`.
#[derive(Clone)]
pub struct FomModel {
    pub name: String,
    pub mass: Mass,
    pub lin: SparseMatrix,
    pub input_map: Matrix,
    pub nonlinearity: Arc<dyn Nonlinearity>,
    pub forcing: Forcing,
    /// Unknown ordering for the banded implicit solve: `ordering[k]` is the
    /// state placed at position `k`. `None` keeps the natural order.
    pub ordering: Option<Vec<usize>>,
}

impl std::fmt::Debug for FomModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FomModel")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("inputs", &self.input_map.cols())
            .finish()
    }
}

impl FomModel {
    pub fn dim(&self) -> usize {
        self.lin.rows()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        let ok = self.lin.cols() == n
            && self.mass.dim() == n
            && self.input_map.rows() == n
            && self.nonlinearity.dim() == n
            && self.ordering.as_ref().is_none_or(|o| o.len() == n);
        if !ok {
            return Err(DeimError::dims("FomModel", n, "non-conformal component"));
        }
        let g = (self.forcing)(0.0);
        if g.len() != self.input_map.cols() {
            return Err(DeimError::dims(
                "FomModel forcing",
                self.input_map.cols(),
                g.len(),
            ));
        }
        Ok(())
    }

    /// Replaces the forcing `g(t)`.
    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = forcing;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Coupled(usize);

    impl Nonlinearity for Coupled {
        fn dim(&self) -> usize {
            self.0
        }
        fn eval(&self, x: &[f64], out: &mut [f64]) {
            for i in 0..self.0 {
                out[i] = x[i] * x[(i + 1) % self.0];
            }
        }
        fn reads(&self, i: usize) -> Vec<usize> {
            // Deliberately omits the wrap-around read of the last component.
            if i + 1 < self.0 {
                vec![i, i + 1]
            } else {
                vec![i]
            }
        }
        fn eval_component(&self, i: usize, vals: &[f64]) -> f64 {
            if vals.len() == 2 {
                vals[0] * vals[1]
            } else {
                let _ = i;
                0.0
            }
        }
    }

    #[test]
    fn probing_finds_missing_read() {
        let f = Coupled(5);
        assert!(validate_pattern(&f, &[0, 1, 2], 1).is_ok());
        assert!(validate_pattern(&f, &[4], 1).is_err());
    }

    #[test]
    fn sparse_round_trip() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 1.0), (2, 1, -2.0), (0, 0, 0.5), (1, 2, 4.0)],
        );
        let d = a.to_dense();
        assert_eq!(
            d,
            Matrix::from_rows(&[[1.5, 0.0, 0.0], [0.0, 0.0, 4.0], [0.0, -2.0, 0.0]])
        );
        let mut out = vec![0.0; 3];
        a.matvec_into(&[1.0, 2.0, 3.0], &mut out);
        assert_eq!(out, vec![1.5, 12.0, -4.0]);
    }
}
