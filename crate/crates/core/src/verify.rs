//! The invariant suite behind `finsler verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{ricci_scalar, ricci_tensor, theorem3_spray_defect};
use crate::error::Result;
use crate::geodesic::{integrate_geodesic, q_along, GeodesicPath};
use crate::metric::{check_homogeneity, eval_metric, fundamental_tensor, norm, random_samples, FinslerMetric, ModelMetric, TangentSample};
use crate::projective::projective_parameter;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub metric: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn record(metric: &str, name: &str, tolerance: f64, outcome: Result<f64>) -> Check {
    let (value, detail) = match outcome {
        Ok(v) => (v, None),
        Err(e) => (f64::NAN, Some(e.to_string())),
    };
    Check {
        metric: metric.to_string(),
        name: name.to_string(),
        value,
        tolerance,
        passed: value <= tolerance,
        detail,
    }
}

/// Random geodesic starting within half the chart radius.
fn random_geodesic<R: Rng>(m: &ModelMetric, rng: &mut R) -> Result<GeodesicPath> {
    let n = m.dim();
    let scale = m.chart_radius().map_or(1.0, |r| 0.5 * r);
    let x: Vec<f64> = loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) * scale).collect();
        if norm(&x) <= scale {
            break x;
        }
    };
    let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if norm(&y) < 1e-3 {
        y[0] = 1.0;
    }
    q_along(m, integrate_geodesic(m, &x, &y, 3.0, 1e-3)?)
}

fn max_rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Runs every check that applies to `m`.
pub fn verify_metric(m: &ModelMetric, seed: u64) -> Vec<Check> {
    let name = serde_json::to_value(m)
        .ok()
        .and_then(|v| v.get("name").and_then(|n| n.as_str().map(String::from)))
        .unwrap_or_else(|| m.name().to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = random_samples(m, 10, &mut rng);
    let n = m.dim() as f64;
    let mut out = Vec::new();

    out.push(record(&name, "homogeneity", 1e-12, check_homogeneity(m, &samples).map(|r| r.max_defect)));
    out.push(record(
        &name,
        "strong convexity",
        0.0,
        samples
            .iter()
            .flat_map(|s| {
                (0..16).map(move |k| {
                    let t = k as f64 * std::f64::consts::PI / 8.0;
                    let mut y = vec![0.0; s.x.len()];
                    y[0] = t.cos();
                    y[1] = t.sin();
                    TangentSample::new(s.x.clone(), y)
                })
            })
            .try_for_each(|s| fundamental_tensor(m, &s).map(|_| ()))
            .map(|_| 0.0),
    ));
    if !out[1].passed {
        return out;
    }

    if let Some(k) = m.flag_curvature() {
        let golden = samples.iter().try_fold(0.0f64, |acc, s| {
            let g = fundamental_tensor(m, s)?;
            let ric = ricci_tensor(m, s)?;
            let want = g * (k * (n - 1.0));
            let scale = want.amax().max(1e-12);
            let scalar = ricci_scalar(m, s)?;
            let f = eval_metric(m, s)?;
            let want_scalar = k * (n - 1.0) * f * f;
            let e = if k == 0.0 {
                ric.amax().max(scalar.abs())
            } else {
                ((ric - want).amax() / scale).max(max_rel(scalar, want_scalar))
            };
            Ok(acc.max(e))
        });
        out.push(record(&name, "Ricci golden values", 1e-4, golden));
    }
    if matches!(m, ModelMetric::Klein { .. }) {
        let spray = samples.iter().try_fold(0.0f64, |acc, s| {
            let r = theorem3_spray_defect(m, s)?;
            Ok(acc.max(r.defect).max((r.norm_ratio - (n - 1.0).sqrt()).abs()))
        });
        out.push(record(&name, "spray of sqrt(-Ric)", 1e-5, spray));
    }

    for g in 0..2 {
        let path = match random_geodesic(m, &mut rng) {
            Ok(p) => p,
            Err(e) => {
                out.push(record(&name, &format!("geodesic {g}"), 0.0, Err(e)));
                continue;
            }
        };
        if m.flag_curvature().is_some() {
            let mean = path.q.iter().sum::<f64>() / path.q.len() as f64;
            let var = path.q.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / path.q.len() as f64;
            out.push(record(&name, &format!("geodesic {g}: Q constant"), 1e-5, Ok(var.sqrt())));
        }
        let pp = match projective_parameter(&path) {
            Ok(pp) => pp,
            Err(e) => {
                out.push(record(&name, &format!("geodesic {g}: projective parameter"), 0.0, Err(e)));
                continue;
            }
        };
        out.push(record(&name, &format!("geodesic {g}: Wronskian drift"), 1e-8, Ok(pp.wronskian_drift())));
        let interior: Vec<usize> = (3..pp.len().saturating_sub(3))
            .filter(|&i| pp.distance_to_pole(pp.s_grid[i]) >= 0.1)
            .collect();
        let stride = (interior.len() / 20).max(1);
        let sch = interior.iter().step_by(stride).try_fold(0.0f64, |acc, &i| {
            Ok(acc.max((pp.schwarzian_at(i)? - 2.0 * pp.q[i]).abs()))
        });
        out.push(record(&name, &format!("geodesic {g}: Schwarzian = 2Q"), 1e-4, sch));
    }
    out
}

/// The built-in models checked by default.
pub fn default_zoo() -> Vec<ModelMetric> {
    vec![
        ModelMetric::euclidean(2),
        ModelMetric::euclidean_ball(2),
        ModelMetric::sphere(2),
        ModelMetric::klein(2),
        ModelMetric::funk(2),
        ModelMetric::randers(2, 0.3),
        ModelMetric::klein(3),
    ]
}

pub fn verify_all(metrics: &[ModelMetric], seed: u64) -> VerifyReport {
    VerifyReport {
        seed,
        checks: metrics.iter().flat_map(|m| verify_metric(m, seed)).collect(),
    }
}
