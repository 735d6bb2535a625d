//! Curvature by nested central differences of `F`, independent of the
//! jet-based code: `G^i = 1/4 g^il ([F^2]_{x^k y^l} y^k - [F^2]_{x^l})`
//! (geodesics `x'' + 2G = 0`) and
//! `R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}`.

use finsler_core::FinslerMetric;
use nalgebra::DMatrix;

/// Base step; results are Richardson-extrapolated from `H` and `2H`.
const H: f64 = 1e-2;

fn shifted(v: &[f64], i: usize, t: f64) -> Vec<f64> {
    let mut w = v.to_vec();
    w[i] += t;
    w
}

fn d1<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

fn d2<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

/// Mixed or pure second derivative of a scalar function of one vector.
fn hessian_entry<F: Fn(&[f64]) -> f64>(f: &F, v: &[f64], i: usize, j: usize, h: f64) -> f64 {
    if i == j {
        d2(|t| f(&shifted(v, i, t)), h)
    } else {
        d1(|s| d1(|t| f(&shifted(&shifted(v, i, s), j, t)), h), h)
    }
}

fn f2<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64]) -> f64 {
    let f = m.eval::<f64>(x, y);
    f * f
}

/// `G^i` in the `x'' + 2G = 0` convention.
fn spray_h<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let g = DMatrix::from_fn(n, n, |i, j| 0.5 * hessian_entry(&|w: &[f64]| f2(m, x, w), y, i, j, h));
    let rhs: Vec<f64> = (0..n)
        .map(|l| {
            let mut acc = 0.0;
            for k in 0..n {
                let mixed = d1(|s| d1(|t| f2(m, &shifted(x, k, s), &shifted(y, l, t)), h), h);
                acc += mixed * y[k];
            }
            acc - d1(|t| f2(m, &shifted(x, l, t), y), h)
        })
        .collect();
    let inv = g.try_inverse().expect("fundamental tensor is invertible");
    (0..n).map(|i| 0.25 * (0..n).map(|l| inv[(i, l)] * rhs[l]).sum::<f64>()).collect()
}

fn ricci_scalar_h<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64], h: f64) -> f64 {
    let n = x.len();
    let g0 = spray_h(m, x, y, h);
    let gi = |i: usize, xx: &[f64], yy: &[f64]| spray_h(m, xx, yy, h)[i];
    let dy = |i: usize, j: usize| d1(|t| gi(i, x, &shifted(y, j, t)), h);
    let mut ric = 0.0;
    for i in 0..n {
        let k = i;
        let mut r = 2.0 * d1(|t| gi(i, &shifted(x, k, t), y), h);
        for j in 0..n {
            let xy = d1(|s| d1(|t| gi(i, &shifted(x, j, s), &shifted(y, k, t)), h), h);
            let yy = hessian_entry(&|w: &[f64]| gi(i, x, w), y, j, k, h);
            r += -y[j] * xy + 2.0 * g0[j] * yy - dy(i, j) * dy(j, k);
        }
        ric += r;
    }
    ric
}

/// `Ric = R^i_i`, extrapolated as `(16 Ric(H) - Ric(2H)) / 15` at the
/// Euclidean unit vector `y / |y|` and scaled back by `|y|^2`.
pub fn ricci_scalar<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64]) -> f64 {
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = y.iter().map(|v| v / r).collect();
    r * r * (16.0 * ricci_scalar_h(m, x, &u, H) - ricci_scalar_h(m, x, &u, 2.0 * H)) / 15.0
}

/// `Ric_ik = 1/2 [Ric]_{y^i y^k}`; the stencil step suits metrics whose
/// `Ric` is quadratic in `y`.
pub fn ricci_tensor<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, k| 0.5 * hessian_entry(&|w: &[f64]| ricci_scalar(m, x, w), y, i, k, 0.25))
}
