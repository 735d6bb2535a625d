use serde::Serialize;

use super::FinslerMetric;
use crate::jet::{dot, Scalar};

/// Built-in model metrics, each with a known curvature sign.
///
/// | metric | chart | flag curvature | reversible |
/// |---|---|---|---|
/// | `Euclidean` | R^n (or the unit ball) | 0 | yes |
/// | `Sphere` | R^n, stereographic | `1 / radius^2` | yes |
/// | `Klein` | unit ball | -1 | yes |
/// | `Funk` | unit ball | -1/4 | no |
/// | `Randers` | ball of `radius` | not constant | no |
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ModelMetric {
    Euclidean { dim: usize, ball: bool },
    Sphere { dim: usize, radius: f64 },
    Klein { dim: usize },
    Funk { dim: usize },
    /// `F = |y| + eps * <b(x), y>` with the rotational field
    /// `b(x) = (-x_2, x_1, 0, ..)`. Strongly convex while `eps * radius < 1`.
    Randers { dim: usize, eps: f64, radius: f64 },
}

impl ModelMetric {
    pub fn euclidean(dim: usize) -> Self {
        ModelMetric::Euclidean { dim, ball: false }
    }

    /// Euclidean metric restricted to the unit ball.
    pub fn euclidean_ball(dim: usize) -> Self {
        ModelMetric::Euclidean { dim, ball: true }
    }

    pub fn sphere(dim: usize) -> Self {
        ModelMetric::Sphere { dim, radius: 1.0 }
    }

    pub fn klein(dim: usize) -> Self {
        ModelMetric::Klein { dim }
    }

    pub fn funk(dim: usize) -> Self {
        ModelMetric::Funk { dim }
    }

    pub fn randers(dim: usize, eps: f64) -> Self {
        ModelMetric::Randers {
            dim,
            eps,
            radius: 1.0,
        }
    }

    /// Constant flag curvature, where the model has one.
    pub fn flag_curvature(&self) -> Option<f64> {
        match self {
            ModelMetric::Euclidean { .. } => Some(0.0),
            ModelMetric::Sphere { radius, .. } => Some(1.0 / (radius * radius)),
            ModelMetric::Klein { .. } => Some(-1.0),
            ModelMetric::Funk { .. } => Some(-0.25),
            ModelMetric::Randers { .. } => None,
        }
    }
}

fn sq<S: Scalar>(v: &[S]) -> S {
    dot(v, v)
}

impl FinslerMetric for ModelMetric {
    fn dim(&self) -> usize {
        match *self {
            ModelMetric::Euclidean { dim, .. }
            | ModelMetric::Sphere { dim, .. }
            | ModelMetric::Klein { dim }
            | ModelMetric::Funk { dim }
            | ModelMetric::Randers { dim, .. } => dim,
        }
    }

    fn name(&self) -> &str {
        match self {
            ModelMetric::Euclidean { .. } => "euclidean",
            ModelMetric::Sphere { .. } => "sphere",
            ModelMetric::Klein { .. } => "klein",
            ModelMetric::Funk { .. } => "funk",
            ModelMetric::Randers { .. } => "randers",
        }
    }

    fn chart_radius(&self) -> Option<f64> {
        match *self {
            ModelMetric::Euclidean { ball: false, .. } | ModelMetric::Sphere { .. } => None,
            ModelMetric::Euclidean { ball: true, .. }
            | ModelMetric::Klein { .. }
            | ModelMetric::Funk { .. } => Some(1.0),
            ModelMetric::Randers { radius, .. } => Some(radius),
        }
    }

    fn reversible(&self) -> bool {
        !matches!(self, ModelMetric::Funk { .. } | ModelMetric::Randers { .. })
    }

    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        match *self {
            ModelMetric::Euclidean { .. } => sq(y).sqrt(),
            ModelMetric::Sphere { radius, .. } => {
                let r2 = radius * radius;
                sq(y).sqrt() * (2.0 * r2) / (sq(x) + r2)
            }
            ModelMetric::Klein { .. } => {
                let a = -sq(x) + 1.0;
                let xy = dot(x, y);
                (a.clone() * sq(y) + xy.clone() * xy).sqrt() / a
            }
            ModelMetric::Funk { .. } => {
                let a = -sq(x) + 1.0;
                let xy = dot(x, y);
                ((a.clone() * sq(y) + xy.clone() * xy.clone()).sqrt() + xy) / a
            }
            ModelMetric::Randers { eps, .. } => {
                let beta = (x[0].clone() * y[1].clone() - x[1].clone() * y[0].clone()) * eps;
                sq(y).sqrt() + beta
            }
        }
    }
}
