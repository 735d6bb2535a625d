//! Finsler metrics, the fundamental tensor and the built-in model metrics.

mod descriptor;
mod zoo;

pub use descriptor::MetricDescriptor;
pub use zoo::ModelMetric;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::jet::{Jet2, Scalar};
use crate::linalg::sym_eigenvalues;

/// Ball-shaped charts reject points with `|x| > (1 - CHART_MARGIN) * radius`.
pub const CHART_MARGIN: f64 = 1e-6;

/// Smallest eigenvalue of `g_ij` must exceed this fraction of the largest.
pub const CONVEXITY_TOL: f64 = 1e-10;

/// A Finsler structure on a single chart of R^n.
///
/// `eval` must be positively 1-homogeneous in `y` and is evaluated over any
/// [`Scalar`], which is how every derivative in this crate is obtained.
pub trait FinslerMetric: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> &str {
        "custom"
    }

    /// Radius of a ball chart centred at the origin, or `None` for all of R^n.
    fn chart_radius(&self) -> Option<f64>;

    /// `F(x, -y) == F(x, y)` for every tangent vector.
    fn reversible(&self) -> bool;

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S;

    fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.chart_radius() {
            None => true,
            Some(r) => norm(x) <= (1.0 - CHART_MARGIN) * r,
        }
    }
}

impl<M: FinslerMetric> FinslerMetric for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn chart_radius(&self) -> Option<f64> {
        (**self).chart_radius()
    }
    fn reversible(&self) -> bool {
        (**self).reversible()
    }
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        (**self).eval(x, y)
    }
    fn contains(&self, x: &[f64]) -> bool {
        (**self).contains(x)
    }
}

/// The reversed metric `F(x, -y)`; its forward geodesics are the backward
/// geodesics of the wrapped metric.
#[derive(Debug, Clone)]
pub struct Reversed<M>(pub M);

impl<M: FinslerMetric> FinslerMetric for Reversed<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn name(&self) -> &str {
        self.0.name()
    }
    fn chart_radius(&self) -> Option<f64> {
        self.0.chart_radius()
    }
    fn reversible(&self) -> bool {
        self.0.reversible()
    }
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let flipped: Vec<S> = y.iter().map(|v| -v.clone()).collect();
        self.0.eval(x, &flipped)
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.0.contains(x)
    }
}

/// A point of the chart together with a tangent vector at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TangentSample {
    pub fn new(x: impl Into<Vec<f64>>, y: impl Into<Vec<f64>>) -> Self {
        TangentSample {
            x: x.into(),
            y: y.into(),
        }
    }

    /// Checks chart membership and `y != 0`.
    pub fn validate<M: FinslerMetric>(&self, m: &M) -> Result<()> {
        if self.x.len() != m.dim() || self.y.len() != m.dim() || !m.contains(&self.x) {
            return Err(FinslerError::DomainError {
                point: self.x.clone(),
            });
        }
        if self.y.iter().all(|v| *v == 0.0) || self.y.iter().any(|v| !v.is_finite()) {
            return Err(FinslerError::ZeroVector);
        }
        Ok(())
    }

    /// Unit direction `l^i = y^i / F(x, y)`.
    pub fn ell<M: FinslerMetric>(&self, m: &M) -> Result<Vec<f64>> {
        let f = eval_metric(m, self)?;
        Ok(self.y.iter().map(|v| v / f).collect())
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        TangentSample {
            x: self.x.clone(),
            y: self.y.iter().map(|v| v * lambda).collect(),
        }
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn eval_metric<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<f64> {
    s.validate(m)?;
    Ok(m.eval(&s.x, &s.y))
}

/// Hessian of `F^2 / 2` in `y` at a given (unchecked) point, over any scalar.
pub(crate) fn fundamental_tensor_in<S: Scalar, M: FinslerMetric>(
    m: &M,
    x: &[S],
    y: &[S],
) -> crate::linalg::Mat<S> {
    let n = m.dim();
    let xs = Jet2::lift(x);
    let ys = Jet2::seed(y, 0, n);
    let f = m.eval(&xs, &ys);
    let e = f.clone() * f * 0.5;
    crate::linalg::Mat::from_fn(n, |i, j| e.hess(i, j))
}

/// The fundamental tensor `g_ij = [F^2/2]_{y^i y^j}`.
pub fn fundamental_tensor<M: FinslerMetric>(m: &M, s: &TangentSample) -> Result<DMatrix<f64>> {
    s.validate(m)?;
    let g = fundamental_tensor_in(m, &s.x, &s.y).to_f64();
    check_convex(&g)?;
    Ok(g)
}

pub(crate) fn check_convex(g: &DMatrix<f64>) -> Result<()> {
    let ev = sym_eigenvalues(g);
    let (min, max) = (ev[0], ev[ev.len() - 1]);
    if !(max > 0.0) || !(min > CONVEXITY_TOL * max) {
        return Err(FinslerError::NotConvex { min, max });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneityReport {
    /// `max |F(x, ly) - l F(x, y)| / (l F(x, y))` over samples and `l`.
    pub max_defect: f64,
    pub lambdas: Vec<f64>,
    pub samples: usize,
}

pub const HOMOGENEITY_LAMBDAS: [f64; 3] = [0.5, 2.0, 7.0];

pub fn check_homogeneity<M: FinslerMetric>(
    m: &M,
    samples: &[TangentSample],
) -> Result<HomogeneityReport> {
    check_homogeneity_with(m, samples, &HOMOGENEITY_LAMBDAS)
}

/// Same as [`check_homogeneity`] with caller-chosen factors. A negative factor
/// measures reversibility instead: `|F(x, -y) - |l| F(x, y)|`.
pub fn check_homogeneity_with<M: FinslerMetric>(
    m: &M,
    samples: &[TangentSample],
    lambdas: &[f64],
) -> Result<HomogeneityReport> {
    let mut max_defect: f64 = 0.0;
    for s in samples {
        let f = eval_metric(m, s)?;
        for &l in lambdas {
            let fl = eval_metric(m, &s.scaled(l))?;
            let want = l.abs() * f;
            max_defect = max_defect.max((fl - want).abs() / want);
        }
    }
    Ok(HomogeneityReport {
        max_defect,
        lambdas: lambdas.to_vec(),
        samples: samples.len(),
    })
}

/// Uniform random chart points (within 85% of a ball chart, or the cube
/// `[-1.5, 1.5]^n` otherwise) with Gaussian-ish tangent vectors.
pub fn random_samples<M: FinslerMetric, R: Rng>(m: &M, count: usize, rng: &mut R) -> Vec<TangentSample> {
    let n = m.dim();
    (0..count)
        .map(|_| {
            let x = random_point(m, rng);
            let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if norm(&y) < 1e-3 {
                y[0] = 1.0;
            }
            TangentSample { x, y }
        })
        .collect()
}

pub fn random_point<M: FinslerMetric, R: Rng>(m: &M, rng: &mut R) -> Vec<f64> {
    let n = m.dim();
    match m.chart_radius() {
        Some(r) => loop {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.85..0.85) * r).collect();
            if norm(&x) <= 0.85 * r {
                break x;
            }
        },
        None => (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zoo() -> Vec<ModelMetric> {
        vec![
            ModelMetric::euclidean(2),
            ModelMetric::sphere(2),
            ModelMetric::klein(2),
            ModelMetric::funk(2),
            ModelMetric::randers(2, 0.3),
            ModelMetric::klein(3),
            ModelMetric::funk(3),
        ]
    }

    #[test]
    fn euclidean_norm() {
        let m = ModelMetric::euclidean(2);
        let f = eval_metric(&m, &TangentSample::new([0.0, 0.0], [3.0, 4.0])).unwrap();
        assert_eq!(f, 5.0);
    }

    #[test]
    fn errors_on_bad_samples() {
        let m = ModelMetric::klein(2);
        assert!(matches!(
            eval_metric(&m, &TangentSample::new([1.0, 0.0], [1.0, 0.0])),
            Err(FinslerError::DomainError { .. })
        ));
        assert_eq!(
            eval_metric(&m, &TangentSample::new([0.1, 0.0], [0.0, 0.0])),
            Err(FinslerError::ZeroVector)
        );
        // just inside the margin is fine, just outside is not
        assert!(m.contains(&[1.0 - 2e-6, 0.0]));
        assert!(!m.contains(&[1.0 - 5e-7, 0.0]));
    }

    #[test]
    fn fundamental_tensor_of_quadratic_forms() {
        let e = ModelMetric::euclidean(3);
        let g = fundamental_tensor(&e, &TangentSample::new([0.3, -2.0, 1.0], [1.0, 2.0, -0.5])).unwrap();
        assert!((g - DMatrix::identity(3, 3)).abs().max() < 1e-14);

        // Round sphere chart: g = 4 / (1 + |x|^2)^2 * I regardless of y.
        let s = ModelMetric::sphere(2);
        let x = [0.4, -0.7];
        let g = fundamental_tensor(&s, &TangentSample::new(x, [0.2, 1.1])).unwrap();
        let c = 4.0 / (1.0 + 0.16 + 0.49_f64).powi(2);
        assert!((g - DMatrix::identity(2, 2) * c).abs().max() < 1e-13);
    }

    #[test]
    fn zoo_tensors_symmetric_definite_and_zero_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in zoo() {
            for s in random_samples(&m, 100, &mut rng) {
                let g = fundamental_tensor(&m, &s).unwrap();
                assert!((&g - g.transpose()).abs().max() <= 1e-12 * g.abs().max());
                let g2 = fundamental_tensor(&m, &s.scaled(3.7)).unwrap();
                assert!((&g - &g2).abs().max() <= 1e-10 * g.abs().max(), "{}", m.name());
                // Euler: g_ij y^i y^j = F^2
                let y = nalgebra::DVector::from_column_slice(&s.y);
                let f = eval_metric(&m, &s).unwrap();
                let q = (y.transpose() * &g * &y)[0];
                assert!((q - f * f).abs() <= 1e-10 * f * f, "{}: {q} vs {}", m.name(), f * f);
            }
        }
    }

    #[test]
    fn homogeneity_defects() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = ModelMetric::euclidean(2);
        let samples = random_samples(&e, 20, &mut rng);
        assert!(check_homogeneity(&e, &samples).unwrap().max_defect <= 4.0 * f64::EPSILON);

        let k = ModelMetric::klein(2);
        let samples = random_samples(&k, 100, &mut rng);
        assert!(check_homogeneity(&k, &samples).unwrap().max_defect <= 1e-12);

        // lambda = -1 exposes non-reversibility of the Funk metric away from 0
        let f = ModelMetric::funk(2);
        let s = vec![TangentSample::new([0.4, 0.1], [1.0, 0.3])];
        let rep = check_homogeneity_with(&f, &s, &[-1.0]).unwrap();
        assert!(rep.max_defect > 0.1);
        assert!(!f.reversible());
        let rep = check_homogeneity_with(&k, &s, &[-1.0]).unwrap();
        assert!(rep.max_defect < 1e-14);
    }

    #[test]
    fn corrupted_randers_is_not_convex() {
        let m = ModelMetric::randers(2, 2.0);
        let s = TangentSample::new([0.8, 0.0], [0.0, -1.0]);
        let err = fundamental_tensor(&m, &s);
        assert!(err.is_err());
    }

    #[test]
    fn reversed_metric_flips_direction() {
        let f = ModelMetric::funk(2);
        let r = Reversed(&f);
        let x = [0.3, 0.2];
        let y = [0.5, -1.0];
        let ny = [-0.5, 1.0];
        assert_eq!(r.eval(&x, &y), f.eval(&x, &ny));
    }
}
