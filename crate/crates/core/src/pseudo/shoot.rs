use serde::Serialize;

use crate::error::{FinslerError, Result};
use crate::geodesic::{integrate_geodesic, GeodesicPath};
use crate::metric::{norm, FinslerMetric};

/// Geodesic from `x` reaching `y` at arc length `s_star`.
#[derive(Debug, Clone, Serialize)]
pub struct ShotGeodesic {
    /// Initial direction in the chart, Euclidean unit length.
    pub direction: Vec<f64>,
    pub s_star: f64,
    pub miss: f64,
}

struct Approach {
    s: f64,
    offset: Vec<f64>,
    velocity: Vec<f64>,
}

impl Approach {
    fn miss(&self) -> f64 {
        norm(&self.offset)
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.into_iter().map(|c| c / n).collect()
}

/// Closest approach of the geodesic from `x` along `dir` to `y`.
fn closest_approach<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64], dir: &[f64], reach: f64, h: f64) -> Result<Approach> {
    let mut s_max = reach;
    let mut path: GeodesicPath;
    let mut best;
    let mut tries = 0;
    loop {
        path = match integrate_geodesic(m, x, dir, s_max, h) {
            Ok(p) => p,
            Err(FinslerError::StepTooLarge { .. } | FinslerError::DomainError { .. }) if tries < 8 && s_max > 4.0 * h => {
                tries += 1;
                s_max *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        best = (0..path.len())
            .min_by(|&i, &j| norm(&sub(&path.x[i], y)).total_cmp(&norm(&sub(&path.x[j], y))))
            .unwrap_or(0);
        tries += 1;
        if best + 1 < path.len() || path.chart_exit[1] || tries >= 8 {
            break;
        }
        s_max *= 2.0;
    }
    let lo = path.s[best.saturating_sub(1)];
    let hi = path.s[(best + 1).min(path.len() - 1)];
    let dist = |s: f64| norm(&sub(&path.position_at(s), y));
    // golden section on the bracketing cells
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if dist(c) < dist(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let s = 0.5 * (a + b);
    let i = crate::geodesic::locate(&path.s, s);
    Ok(Approach {
        s,
        offset: sub(y, &path.position_at(s)),
        velocity: path.v[i].clone(),
    })
}

/// Finds the geodesic from `x` to `y`: first along the chord, then by
/// bisection on the launch angle in the plane of the chord and the first
/// miss, using the signed side of the closest approach.
pub fn shoot_geodesic<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64], reach: f64, h: f64, tol: f64) -> Result<ShotGeodesic> {
    let chord = sub(y, x);
    if norm(&chord) == 0.0 {
        return Err(FinslerError::ZeroVector);
    }
    let e1 = unit(chord);
    let first = closest_approach(m, x, y, &e1, reach, h)?;
    if first.miss() <= tol {
        return Ok(ShotGeodesic {
            direction: e1,
            s_star: first.s,
            miss: first.miss(),
        });
    }
    let along = dot(&first.offset, &e1);
    let e2 = unit(first.offset.iter().zip(&e1).map(|(o, e)| o - along * e).collect());
    if !e2.iter().all(|c| c.is_finite()) {
        return Err(FinslerError::NoGeodesicFound("closest approach lies on the chord".into()));
    }
    let launch = |t: f64| -> Vec<f64> { e1.iter().zip(&e2).map(|(a, b)| t.cos() * a + t.sin() * b).collect() };
    // side of y relative to the geodesic, measured against e2 turned with v
    let side = |a: &Approach| -> f64 {
        let v = unit(a.velocity.clone());
        let n: Vec<f64> = if v.len() == 2 {
            vec![-v[1], v[0]]
        } else {
            let w = dot(&e2, &v);
            unit(e2.iter().zip(&v).map(|(e, c)| e - w * c).collect())
        };
        let sign = if dot(&n, &e2) >= 0.0 { 1.0 } else { -1.0 };
        sign * dot(&a.offset, &n)
    };
    let f0 = side(&first);
    let mut bracket = None;
    let mut delta = 1e-3;
    while delta < 1.5 {
        let t = if f0 > 0.0 { delta } else { -delta };
        if let Ok(a) = closest_approach(m, x, y, &launch(t), reach, h) {
            if side(&a) * f0 < 0.0 {
                bracket = Some((0.0, t, f0));
                break;
            }
        }
        delta *= 2.0;
    }
    let (mut lo, mut hi, f_lo) = bracket.ok_or_else(|| FinslerError::NoGeodesicFound("launch angle not bracketed".into()))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let dir = launch(mid);
        let a = closest_approach(m, x, y, &dir, reach, h)?;
        if a.miss() <= tol {
            return Ok(ShotGeodesic {
                direction: dir,
                s_star: a.s,
                miss: a.miss(),
            });
        }
        if side(&a) * f_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 1e-15 {
            break;
        }
    }
    Err(FinslerError::NoGeodesicFound(format!("bisection stalled between angles {lo} and {hi}")))
}
