//! Small dense linear algebra over [`Scalar`], for n <= 8.

use nalgebra::DMatrix;

use crate::error::{FinslerError, Result};
use crate::jet::Scalar;

/// Row-major square matrix over a generic scalar.
#[derive(Clone, Debug)]
pub struct Mat<S> {
    pub n: usize,
    pub a: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            a: vec![S::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        Mat { n, a }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.a[i * self.n + j]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.a[i * self.n + j].clone()
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(S::zero(), |acc, j| acc + self.get(i, j) * v[j].clone())
            })
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            n: self.n,
            a: self.a.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.at(i, j).re())
    }
}

/// LU factorisation with partial pivoting; pivots are chosen on real parts.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    n: usize,
    lu: Vec<S>,
    perm: Vec<usize>,
}

/// Relative pivot floor: a pivot below `PIVOT_TOL * max |pivot|` is singular.
pub const PIVOT_TOL: f64 = 1e-12;

impl<S: Scalar> Lu<S> {
    pub fn new(m: &Mat<S>) -> Result<Self> {
        let n = m.n;
        let mut lu = m.a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.a.iter().fold(0.0_f64, |acc, v| acc.max(v.re().abs()));
        if scale == 0.0 || !scale.is_finite() {
            return Err(FinslerError::SingularMetric);
        }
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    lu[i * n + k]
                        .re()
                        .abs()
                        .total_cmp(&lu[j * n + k].re().abs())
                })
                .unwrap_or(k);
            if lu[p * n + k].re().abs() <= PIVOT_TOL * scale {
                return Err(FinslerError::SingularMetric);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = lu[k * n + k].clone().recip();
            for i in k + 1..n {
                let f = lu[i * n + k].clone() * piv.clone();
                for j in k + 1..n {
                    lu[i * n + j] = lu[i * n + j].clone() - f.clone() * lu[k * n + j].clone();
                }
                lu[i * n + k] = f;
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i].clone() - self.lu[i * n + j].clone() * x[j].clone();
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i].clone() - self.lu[i * n + j].clone() * x[j].clone();
            }
            x[i] = x[i].clone() / self.lu[i * n + i].clone();
        }
        x
    }

    pub fn inverse(&self) -> Mat<S> {
        let n = self.n;
        let mut inv = Mat::zeros(n);
        for j in 0..n {
            let mut e = vec![S::zero(); n];
            e[j] = S::one();
            let col = self.solve(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv.a[i * n + j] = v;
            }
        }
        inv
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
