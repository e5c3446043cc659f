//! Dense LU with partial pivoting and a banded LU for the full-order solves.

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;

/// `P A = L U` for a square matrix.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: Matrix,
    piv: Vec<usize>,
    sign: f64,
}

impl DenseLu {
    pub fn factor(a: &Matrix) -> Result<DenseLu> {
        let n = a.rows();
        if a.cols() != n {
            return Err(DeimError::dims(
                "DenseLu::factor",
                "square",
                format!("{:?}", a.shape()),
            ));
        }
        let mut lu = a.clone();
        let mut piv = Vec::with_capacity(n);
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv.push(p);
            if p != k {
                sign = -sign;
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let d = lu[(k, k)];
            if d == 0.0 {
                continue;
            }
            for i in k + 1..n {
                lu[(i, k)] /= d;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == 0.0 {
                    continue;
                }
                for i in k + 1..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * ukj;
                }
            }
        }
        Ok(DenseLu { lu, piv, sign })
    }

    pub fn determinant(&self) -> f64 {
        (0..self.lu.rows()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn is_singular(&self) -> bool {
        (0..self.lu.rows()).any(|i| self.lu[(i, i)] == 0.0)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(DeimError::dims("DenseLu::solve", n, b.len()));
        }
        for (k, &p) in self.piv.iter().enumerate() {
            b.swap(k, p);
        }
        for j in 0..n {
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..n {
                    b[i] -= self.lu[(i, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let d = self.lu[(j, j)];
            if d == 0.0 {
                return Err(DeimError::Singular { index: j });
            }
            b[j] /= d;
            let bj = b[j];
            if bj != 0.0 {
                for i in 0..j {
                    b[i] -= self.lu[(i, j)] * bj;
                }
            }
        }
        Ok(())
    }
}

pub fn determinant(a: &Matrix) -> Result<f64> {
    Ok(DenseLu::factor(a)?.determinant())
}

/// Banded matrix in LAPACK-like diagonal storage with LU factorization
/// without pivoting (the full-order systems are diagonally dominant).
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    // band[(i - j + upper) + j * width] = A(i, j)
    band: Vec<f64>,
}

impl BandedLu {
    /// Factors `A` given as triplets (duplicates are summed).
    pub fn factor(n: usize, entries: &[(usize, usize, f64)]) -> Result<BandedLu> {
        let mut lower = 0;
        let mut upper = 0;
        for &(i, j, _) in entries {
            if i >= n || j >= n {
                return Err(DeimError::dims("BandedLu::factor", n, i.max(j) + 1));
            }
            if i > j {
                lower = lower.max(i - j);
            } else {
                upper = upper.max(j - i);
            }
        }
        let width = lower + upper + 1;
        let mut band = vec![0.0; width * n];
        for &(i, j, v) in entries {
            band[(i + upper - j) + j * width] += v;
        }
        let mut lu = BandedLu {
            n,
            lower,
            upper,
            band,
        };
        lu.eliminate()?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        (i + self.upper - j) + j * (self.lower + self.upper + 1)
    }

    fn eliminate(&mut self) -> Result<()> {
        let n = self.n;
        for k in 0..n {
            let d = self.band[self.at(k, k)];
            if d == 0.0 {
                return Err(DeimError::Singular { index: k });
            }
            let imax = (k + self.lower).min(n - 1);
            let jmax = (k + self.upper).min(n - 1);
            for i in k + 1..=imax {
                let idx = self.at(i, k);
                self.band[idx] /= d;
                let l = self.band[idx];
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=jmax {
                    let u = self.band[self.at(k, j)];
                    let t = self.at(i, j);
                    self.band[t] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + self.lower).min(n - 1) {
                    b[i] -= self.band[self.at(i, k)] * bk;
                }
            }
        }
        for k in (0..n).rev() {
            b[k] /= self.band[self.at(k, k)];
            let bk = b[k];
            if bk != 0.0 {
                for i in k.saturating_sub(self.upper)..k {
                    b[i] -= self.band[self.at(i, k)] * bk;
                }
            }
        }
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_permutation_and_scaling() {
        let a = Matrix::from_rows(&[[0.0, 2.0], [3.0, 0.0]]);
        assert_eq!(determinant(&a).unwrap(), -6.0);
    }

    #[test]
    fn dense_solve() {
        let a = Matrix::from_rows(&[[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 2.0, 5.0]]);
        let x = [1.0, -2.0, 0.5];
        let mut b = a.matvec(&x).unwrap();
        DenseLu::factor(&a).unwrap().solve_in_place(&mut b).unwrap();
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn banded_solve_matches_dense() {
        let n = 9;
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 4.0 + i as f64));
            if i + 1 < n {
                entries.push((i, i + 1, -1.0));
                entries.push((i + 1, i, -0.5));
            }
            if i + 3 < n {
                entries.push((i + 3, i, 0.25));
            }
        }
        let lu = BandedLu::factor(n, &entries).unwrap();
        assert_eq!(lu.bandwidths(), (3, 1));
        let mut dense = Matrix::zeros(n, n);
        for &(i, j, v) in &entries {
            dense[(i, j)] += v;
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut b = dense.matvec(&x).unwrap();
        lu.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
