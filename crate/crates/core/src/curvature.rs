//! Spray coefficients, nonlinear connection, Riemann curvature and Ricci
//! quantities of a Finsler metric.
//!
//! Convention: the spray satisfies `x'' + G^i(x, x') = 0`, so for a
//! Riemannian metric `G^i = gamma^i_jk y^j y^k` with the full Christoffel
//! symbols. References that write `x'' + 2 G^i = 0` use half of this `G`.
//! With this convention
//!
//! ```text
//! G^i      = 1/2 g^il ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} )
//! N^i_j    = 1/2 dG^i/dy^j
//! R^i_k    = dG^i/dx^k - 1/2 y^j d2G^i/dx^j dy^k
//!            + 1/2 G^j d2G^i/dy^j dy^k - 1/4 dG^i/dy^j dG^j/dy^k
//! Ric      = R^i_i                        (2-homogeneous in y)
//! Ric_ik   = 1/2 d2 Ric / dy^i dy^k       (0-homogeneous, Ric_ik y^i y^k = Ric)
//! ```
//!
//! All derivatives come from nested [`Jet2`]/[`Dual`] evaluation of the
//! metric: the spray needs one jet layer over `(x, y)`, the Riemann tensor a
//! second, and the Ricci tensor a third over `y` alone.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{FinslerError, Result};
use crate::jet::{Dual, Jet2, Scalar};
use crate::linalg::{sym_eigenvalues, Lu, Mat};
use crate::metric::{check_convex, fundamental_tensor_in, FinslerMetric, TangentSample};

/// Spray coefficients at an unchecked point, over any scalar.
pub fn spray_in<S: Scalar, M: FinslerMetric>(m: &M, x: &[S], y: &[S]) -> Result<Vec<S>> {
    let n = m.dim();
    let w = 2 * n;
    let xs = Jet2::seed(x, 0, w);
    let ys = Jet2::seed(y, n, w);
    let f = m.eval(&xs, &ys);
    let f2 = f.clone() * f;
    let g = Mat::from_fn(n, |i, j| f2.hess(n + i, n + j) * 0.5);
    let rhs: Vec<S> = (0..n)
        .map(|l| {
            let mixed = (0..n).fold(S::zero(), |acc, k| acc + f2.hess(k, n + l) * y[k].clone());
            mixed - f2.grad(l)
        })
        .collect();
    let z = Lu::new(&g)?.solve(&rhs);
    Ok(z.into_iter().map(|v| v * 0.5).collect())
}

/// Spray data together with the Riemann curvature, over any scalar.
#[derive(Debug, Clone)]
pub(crate) struct RiemannParts<S> {
    pub g: Vec<S>,
    /// `dG^i/dy^j` at `(i, j)`.
    pub dgdy: Mat<S>,
    /// `d2G^i/dy^j dy^k`, one matrix per `i`.
    pub d2gdy2: Vec<Mat<S>>,
    pub r: Mat<S>,
}

pub(crate) fn riemann_in<S: Scalar, M: FinslerMetric>(
    m: &M,
    x: &[S],
    y: &[S],
) -> Result<RiemannParts<S>> {
    let n = m.dim();
    let w = 2 * n;
    let xs = Jet2::seed(x, 0, w);
    let ys = Jet2::seed(y, n, w);
    let gj = spray_in(m, &xs, &ys)?;

    let g: Vec<S> = gj.iter().map(|v| v.value().clone()).collect();
    let dgdy = Mat::from_fn(n, |i, j| gj[i].grad(n + j));
    let d2gdy2: Vec<Mat<S>> = (0..n)
        .map(|i| Mat::from_fn(n, |j, k| gj[i].hess(n + j, n + k)))
        .collect();
    let r = Mat::from_fn(n, |i, k| {
        let mut acc = gj[i].grad(k);
        for j in 0..n {
            acc = acc - gj[i].hess(j, n + k) * y[j].clone() * 0.5
                + d2gdy2[i].get(j, k) * g[j].clone() * 0.5
                - dgdy.get(i, j) * dgdy.get(j, k) * 0.25;
        }
        acc
    });
    Ok(RiemannParts { g, dgdy, d2gdy2, r })
}

fn trace<S: Scalar>(m: &Mat<S>) -> S {
    (0..m.n).fold(S::zero(), |acc, i| acc + m.get(i, i))
}

pub(crate) fn ricci_scalar_in<S: Scalar, M: FinslerMetric>(m: &M, x: &[S], y: &[S]) -> Result<S> {
    Ok(trace(&riemann_in(m, x, y)?.r))
}

pub(crate) fn ricci_tensor_in<S: Scalar, M: FinslerMetric>(
    m: &M,
    x: &[S],
    y: &[S],
) -> Result<Mat<S>> {
    let n = m.dim();
    let xs = Jet2::lift(x);
    let ys = Jet2::seed(y, 0, n);
    let ric = ricci_scalar_in(m, &xs, &ys)?;
    Ok(Mat::from_fn(n, |i, k| ric.hess(i, k) * 0.5))
}

fn checked<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<()> {
    s.validate(m)?;
    check_convex(&fundamental_tensor_in(m, &s.x, &s.y).to_f64())
}

pub fn spray_coefficients<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<DVector<f64>> {
    checked(m, s)?;
    Ok(DVector::from_vec(spray_in(m, &s.x, &s.y)?))
}

/// `N^i_j = 1/2 dG^i/dy^j`.
pub fn nonlinear_connection<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<DMatrix<f64>> {
    checked(m, s)?;
    let n = m.dim();
    let g = spray_in(m, &Jet2::lift(&s.x), &Jet2::seed(&s.y, 0, n))?;
    Ok(DMatrix::from_fn(n, n, |i, j| 0.5 * g[i].grad(j)))
}

pub fn riemann_curvature<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<DMatrix<f64>> {
    checked(m, s)?;
    Ok(riemann_in(m, &s.x, &s.y)?.r.to_f64())
}

pub fn ricci_scalar<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<f64> {
    checked(m, s)?;
    ricci_scalar_in(m, &s.x, &s.y)
}

pub fn ricci_tensor<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<DMatrix<f64>> {
    checked(m, s)?;
    Ok(ricci_tensor_in(m, &s.x, &s.y)?.to_f64())
}

/// Every curvature quantity at one tangent sample.
#[derive(Debug, Clone, Serialize)]
pub struct CurvaturePack {
    pub spray: DVector<f64>,
    pub connection: DMatrix<f64>,
    pub riemann: DMatrix<f64>,
    pub ric_scalar: f64,
    pub ric_tensor: DMatrix<f64>,
}

impl CurvaturePack {
    /// Smallest eigenvalue of `Ric_ik`.
    pub fn ric_eigmin(&self) -> f64 {
        sym_eigenvalues(&self.ric_tensor)[0]
    }
}

pub fn curvature_pack<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<CurvaturePack> {
    checked(m, s)?;
    let n = m.dim();
    let parts = riemann_in(m, &Jet2::lift(&s.x), &Jet2::seed(&s.y, 0, n))?;
    let ric = trace(&parts.r);
    Ok(CurvaturePack {
        spray: DVector::from_iterator(n, parts.g.iter().map(|v| *v.value())),
        connection: DMatrix::from_fn(n, n, |i, j| 0.5 * parts.dgdy.at(i, j).value()),
        riemann: DMatrix::from_fn(n, n, |i, k| *parts.r.at(i, k).value()),
        ric_scalar: *ric.value(),
        ric_tensor: DMatrix::from_fn(n, n, |i, k| 0.5 * ric.hess(i, k)),
    })
}

/// Horizontal and vertical Berwald covariant derivatives of `Ric_ij`,
/// reported as max-abs defects.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BerwaldDefect {
    /// `max |dRic_ij/dx^k - N^l_k dRic_ij/dy^l - Ric_ir G^r_jk - Ric_jr G^r_ik|`
    pub horizontal: f64,
    /// `max |dRic_ij/dy^k|`
    pub vertical: f64,
}

pub fn berwald_parallel_defect<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<BerwaldDefect> {
    checked(m, s)?;
    let n = m.dim();
    let base = riemann_in(m, &s.x, &s.y)?;
    let conn = |l: usize, k: usize| 0.5 * base.dgdy.get(l, k);
    let berwald = |r: usize, j: usize, k: usize| 0.5 * base.d2gdy2[r].get(j, k);

    let w = 2 * n;
    let ric = ricci_tensor_in(m, &Dual::seed(&s.x, 0, w), &Dual::seed(&s.y, n, w))?;
    let val = |i: usize, j: usize| *ric.at(i, j).value();

    let mut horizontal: f64 = 0.0;
    let mut vertical: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = ric.at(i, j);
            for k in 0..n {
                vertical = vertical.max(e.grad(n + k).abs());
                let mut h = e.grad(k);
                for l in 0..n {
                    h -= conn(l, k) * e.grad(n + l);
                }
                for r in 0..n {
                    h -= val(i, r) * berwald(r, j, k) + val(j, r) * berwald(r, i, k);
                }
                horizontal = horizontal.max(h.abs());
            }
        }
    }
    Ok(BerwaldDefect {
        horizontal,
        vertical,
    })
}

/// Outcome of comparing the spray of `F_hat = sqrt(-Ric_ij y^i y^j)` with the
/// spray of `F`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SprayEquality {
    /// `max_i |G_hat^i - G^i| / (1 + |G^i|)`
    pub defect: f64,
    /// `F_hat(x, y) / F(x, y)`
    pub norm_ratio: f64,
}

/// Builds `F_hat` from a negative-definite Ricci tensor and compares sprays.
///
/// `G_hat^i = Ric^ih dRic_hl/dx^j y^l y^j - 1/2 Ric^ih dRic_lr/dx^h y^l y^r`,
/// i.e. the spray formula for `F_hat` with `(-Ric)^ih` as inverse metric and
/// `Ric_ij` treated as independent of `y`.
pub fn theorem3_spray_defect<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<SprayEquality> {
    checked(m, s)?;
    let n = m.dim();
    let y = &s.y;
    let ric = ricci_tensor_in(m, &Dual::seed(&s.x, 0, n), &Dual::lift(y))?;
    let val = Mat::from_fn(n, |i, j| *ric.at(i, j).value());
    let ev = sym_eigenvalues(&val.to_f64());
    let max_eig = ev[n - 1];
    if !(max_eig < -1e-10 * ev[0].abs()) {
        return Err(FinslerError::NotNegativeDefinite { max_eig });
    }
    let inv = Lu::new(&val)?.inverse();

    let mut rhs = vec![0.0; n];
    for (h, out) in rhs.iter_mut().enumerate() {
        let mut a = 0.0;
        let mut b = 0.0;
        for l in 0..n {
            for j in 0..n {
                a += ric.at(h, l).grad(j) * y[l] * y[j];
                b += ric.at(l, j).grad(h) * y[l] * y[j];
            }
        }
        *out = a - 0.5 * b;
    }
    let g_hat = inv.mul_vec(&rhs);
    let g = spray_in(m, &s.x, y)?;
    let defect = g_hat
        .iter()
        .zip(&g)
        .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
        .fold(0.0, f64::max);

    let quad: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| val.get(i, j) * y[i] * y[j])
        .sum();
    let norm_ratio = (-quad).sqrt() / m.eval(&s.x, y);
    Ok(SprayEquality { defect, norm_ratio })
}
