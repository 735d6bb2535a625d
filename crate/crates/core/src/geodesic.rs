//! Arc-length geodesics by fixed-step RK4, and the potential
//! `Q(s) = Ric_ij x'^i x'^j / (n - 1)` sampled along them.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{ricci_scalar_in, spray_in};
use crate::error::{FinslerError, Result};
use crate::metric::{norm, FinslerMetric, Reversed, TangentSample};

pub const DEFAULT_STEP: f64 = 1e-3;

/// Integration stops once `|x| > (1 - BOUNDARY_MARGIN) * radius` on ball charts.
pub const BOUNDARY_MARGIN: f64 = 1e-4;

/// Unit-speed drift beyond this aborts with [`FinslerError::StepTooLarge`].
pub const DRIFT_LIMIT: f64 = 1e-4;

/// Arc-length sampled geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicPath {
    pub s: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    /// `Q(s_i)`; empty until [`q_along`] fills it.
    pub q: Vec<f64>,
    /// Whether the backward / forward end stopped at the chart boundary.
    pub chart_exit: [bool; 2],
}

impl GeodesicPath {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.s[0], self.s[self.s.len() - 1])
    }

    /// Errors with [`FinslerError::ChartExit`] if either end hit the boundary.
    pub fn ensure_complete(&self) -> Result<&Self> {
        if self.chart_exit[0] {
            return Err(FinslerError::ChartExit { s: self.s[0] });
        }
        if self.chart_exit[1] {
            return Err(FinslerError::ChartExit {
                s: self.s[self.s.len() - 1],
            });
        }
        Ok(self)
    }

    /// `max_i |F(x_i, v_i) - 1|`.
    pub fn speed_drift<M: FinslerMetric>(&self, m: &M) -> f64 {
        self.x
            .iter()
            .zip(&self.v)
            .map(|(x, v)| (m.eval(x, v) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Cubic Hermite interpolation of the position at arc length `s`.
    pub fn position_at(&self, s: f64) -> Vec<f64> {
        let i = locate(&self.s, s);
        let (s0, s1) = (self.s[i], self.s[i + 1]);
        let h = s1 - s0;
        let t = ((s - s0) / h).clamp(0.0, 1.0);
        let (h00, h10, h01, h11) = hermite_basis(t);
        (0..self.dim())
            .map(|k| {
                h00 * self.x[i][k]
                    + h10 * h * self.v[i][k]
                    + h01 * self.x[i + 1][k]
                    + h11 * h * self.v[i + 1][k]
            })
            .collect()
    }

    /// CSV with columns `s, x1..xn, v1..vn, Q` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.dim();
        let mut header = vec!["s".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("v{i}")));
        header.push("Q".into());
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.len() {
            let mut row = vec![fmt_f64(self.s[i])];
            row.extend(self.x[i].iter().map(|v| fmt_f64(*v)));
            row.extend(self.v[i].iter().map(|v| fmt_f64(*v)));
            row.push(self.q.get(i).map_or_else(String::new, |q| fmt_f64(*q)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Decimal float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Index `i` with `grid[i] <= s < grid[i + 1]`, clamped to the grid.
pub(crate) fn locate(grid: &[f64], s: f64) -> usize {
    let last = grid.len() - 2;
    match grid.binary_search_by(|p| p.total_cmp(&s)) {
        Ok(i) => i.min(last),
        Err(0) => 0,
        Err(i) => (i - 1).min(last),
    }
}

struct Stepper<'a, M> {
    m: &'a M,
    n: usize,
}

impl<M: FinslerMetric> Stepper<'_, M> {
    fn accel(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        Ok(spray_in(self.m, x, v)?.into_iter().map(|g| -g).collect())
    }

    fn step(&self, x: &[f64], v: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let axpy = |a: &[f64], b: &[f64], c: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(p, q)| p + c * q).collect()
        };
        let k1x = v.to_vec();
        let k1v = self.accel(x, v)?;
        let (x2, v2) = (axpy(x, &k1x, h / 2.0), axpy(v, &k1v, h / 2.0));
        let k2v = self.accel(&x2, &v2)?;
        let (x3, v3) = (axpy(x, &v2, h / 2.0), axpy(v, &k2v, h / 2.0));
        let k3v = self.accel(&x3, &v3)?;
        let (x4, v4) = (axpy(x, &v3, h), axpy(v, &k3v, h));
        let k4v = self.accel(&x4, &v4)?;
        let mut xn = vec![0.0; n];
        let mut vn = vec![0.0; n];
        for i in 0..n {
            xn[i] = x[i] + h / 6.0 * (k1x[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            vn[i] = v[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
        Ok((xn, vn))
    }
}

struct OneSided {
    s: Vec<f64>,
    x: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    exit: bool,
}

fn integrate_one_sided<M: FinslerMetric>(
    m: &M,
    x0: &[f64],
    v0: &[f64],
    s_max: f64,
    h: f64,
) -> Result<OneSided> {
    let n = m.dim();
    let stepper = Stepper { m, n };
    let limit = m.chart_radius().map(|r| (1.0 - BOUNDARY_MARGIN) * r);
    let inside = |x: &[f64]| x.iter().all(|v| v.is_finite()) && limit.map_or(true, |l| norm(x) <= l);

    let mut out = OneSided {
        s: vec![0.0],
        x: vec![x0.to_vec()],
        v: vec![v0.to_vec()],
        exit: false,
    };
    let steps = (s_max / h).round() as usize;
    for k in 0..steps {
        let (x, v) = (&out.x[k], &out.v[k]);
        let s = out.s[k];
        let h_k = if k + 1 == steps { s_max - s } else { h };
        let (xn, vn) = match stepper.step(x, v, h_k) {
            Ok(next) if inside(&next.0) => next,
            Ok(_) | Err(FinslerError::SingularMetric) if limit.is_some() => {
                // land exactly on the margin sphere
                let (mut lo, mut hi) = (0.0, h_k);
                let mut best = (x.clone(), v.clone(), 0.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    match stepper.step(x, v, mid) {
                        Ok(t) if inside(&t.0) => {
                            lo = mid;
                            best = (t.0, t.1, mid);
                        }
                        _ => hi = mid,
                    }
                }
                if best.2 > 0.0 {
                    out.s.push(s + best.2);
                    out.x.push(best.0);
                    out.v.push(best.1);
                }
                out.exit = true;
                return Ok(out);
            }
            Ok(_) => return Err(FinslerError::DomainError { point: x.clone() }),
            Err(e) => return Err(e),
        };
        let drift = (m.eval(&xn, &vn) - 1.0).abs();
        if drift > DRIFT_LIMIT {
            return Err(FinslerError::StepTooLarge { drift });
        }
        out.s.push(s + h_k);
        out.x.push(xn);
        out.v.push(vn);
    }
    Ok(out)
}

fn unit_initial<M: FinslerMetric>(m: &M, x0: &[f64], y0: &[f64]) -> Result<Vec<f64>> {
    let f = crate::metric::eval_metric(m, &TangentSample::new(x0, y0))?;
    if !(f > 0.0) {
        return Err(FinslerError::ZeroVector);
    }
    Ok(y0.iter().map(|v| v / f).collect())
}

/// Integrates `x'' + G(x, x') = 0` forward from `(x0, y0 / F(x0, y0))` over
/// `[0, s_max]` with step `h`. A ball-chart boundary ends the path early on
/// the margin sphere with `chart_exit[1]` set.
pub fn integrate_geodesic<M: FinslerMetric>(
    m: &M,
    x0: &[f64],
    y0: &[f64],
    s_max: f64,
    h: f64,
) -> Result<GeodesicPath> {
    integrate_geodesic_through(m, x0, y0, 0.0, s_max, h)
}

/// Integrates over `[-s_back, s_fwd]`. The backward half follows the
/// reversed metric `F(x, -y)` forward from `(x0, -y0)`.
pub fn integrate_geodesic_through<M: FinslerMetric>(
    m: &M,
    x0: &[f64],
    y0: &[f64],
    s_back: f64,
    s_fwd: f64,
    h: f64,
) -> Result<GeodesicPath> {
    if !(h > 0.0) || !(s_back >= 0.0) || !(s_fwd >= 0.0) {
        return Err(FinslerError::GridMismatch(format!(
            "need h > 0 and non-negative range, got h = {h}, [-{s_back}, {s_fwd}]"
        )));
    }
    let v0 = unit_initial(m, x0, y0)?;
    let fwd = integrate_one_sided(m, x0, &v0, s_fwd, h)?;
    let mut path = GeodesicPath {
        s: Vec::new(),
        x: Vec::new(),
        v: Vec::new(),
        q: Vec::new(),
        chart_exit: [false, fwd.exit],
    };
    if s_back > 0.0 {
        let back_v0: Vec<f64> = v0.iter().map(|v| -v).collect();
        let back = integrate_one_sided(&Reversed(m), x0, &back_v0, s_back, h)?;
        path.chart_exit[0] = back.exit;
        for i in (1..back.s.len()).rev() {
            path.s.push(-back.s[i]);
            path.x.push(back.x[i].clone());
            path.v.push(back.v[i].iter().map(|v| -v).collect());
        }
    }
    path.s.extend(fwd.s);
    path.x.extend(fwd.x);
    path.v.extend(fwd.v);
    Ok(path)
}

/// Fills `path.q` with `Q(s_i) = Ric(x_i, v_i) / (n - 1)`, using
/// `Ric_ij v^i v^j = Ric(v)`.
pub fn q_along<M: FinslerMetric>(m: &M, mut path: GeodesicPath) -> Result<GeodesicPath> {
    let n1 = (m.dim() - 1) as f64;
    path.q = path
        .x
        .par_iter()
        .zip(path.v.par_iter())
        .map(|(x, v)| ricci_scalar_in(m, x, v).map(|r| r / n1))
        .collect::<Result<Vec<f64>>>()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ModelMetric;

    #[test]
    fn euclidean_straight_line() {
        let m = ModelMetric::euclidean(2);
        let p = integrate_geodesic(&m, &[0.0, 0.0], &[2.0, 0.0], 5.0, DEFAULT_STEP).unwrap();
        for (s, x) in p.s.iter().zip(&p.x) {
            assert!((x[0] - s).abs() <= 1e-10 && x[1].abs() <= 1e-10);
        }
        assert_eq!(p.len(), 5001);
        assert!((p.s_range().1 - 5.0).abs() < 1e-12);
        let p = q_along(&m, p).unwrap();
        assert!(p.q.iter().all(|q| q.abs() < 1e-12));
    }

    #[test]
    fn klein_geodesics_through_origin_are_diameters() {
        let m = ModelMetric::klein(2);
        let dir = [0.6, -0.8];
        let p = integrate_geodesic(&m, &[0.0, 0.0], &dir, 3.0, 1e-3).unwrap();
        for (s, x) in p.s.iter().zip(&p.x) {
            let cross = x[0] * dir[1] - x[1] * dir[0];
            assert!(cross.abs() <= 1e-8);
            assert!((norm(x) - s.tanh()).abs() <= 1e-9, "{s}");
        }
    }

    #[test]
    fn klein_geodesics_stay_straight_off_centre() {
        let m = ModelMetric::klein(2);
        let x0 = [0.3, -0.2];
        let y0 = [0.1, 1.0];
        let p = integrate_geodesic(&m, &x0, &y0, 3.0, 1e-3).unwrap();
        let len = norm(&y0);
        let dev = p
            .x
            .iter()
            .map(|x| ((x[0] - x0[0]) * y0[1] - (x[1] - x0[1]) * y0[0]).abs() / len)
            .fold(0.0, f64::max);
        assert!(dev <= 1e-6, "{dev}");
        let p = q_along(&m, p).unwrap();
        let dq = p.q.iter().map(|q| (q + 1.0).abs()).fold(0.0, f64::max);
        assert!(dq <= 1e-5, "{dq}");
    }

    #[test]
    fn sphere_equator_closes_after_two_pi() {
        let m = ModelMetric::sphere(2);
        let tau = std::f64::consts::TAU;
        let p = integrate_geodesic(&m, &[1.0, 0.0], &[0.0, 1.0], tau, 1e-3).unwrap();
        let end = p.x.last().unwrap();
        assert!((end[0] - 1.0).abs() <= 1e-5 && end[1].abs() <= 1e-5);
        let p = q_along(&m, p).unwrap();
        assert!(p.q.iter().all(|q| (q - 1.0).abs() <= 1e-5));
    }

    #[test]
    fn unit_speed_is_conserved() {
        let m = ModelMetric::sphere(2);
        let p = integrate_geodesic(&m, &[0.5, 0.2], &[0.3, 1.0], 20.0, 1e-3).unwrap();
        assert!(p.speed_drift(&m) <= 1e-6);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // equator of the unit sphere: x(s) = (cos s, sin s)
        let m = ModelMetric::sphere(2);
        let err = |h: f64| {
            let p = integrate_geodesic(&m, &[1.0, 0.0], &[0.0, 1.0], 4.0, h).unwrap();
            let x = p.x.last().unwrap();
            ((x[0] - 4f64.cos()).powi(2) + (x[1] - 4f64.sin()).powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio >= 8.0, "{ratio}");
    }

    #[test]
    fn klein_stops_on_the_margin() {
        let m = ModelMetric::klein(2);
        let p = integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], 20.0, 1e-2).unwrap();
        assert!(p.chart_exit[1]);
        let last = p.x.last().unwrap();
        assert!((norm(last) - (1.0 - BOUNDARY_MARGIN)).abs() < 1e-12);
        assert!(matches!(p.ensure_complete(), Err(FinslerError::ChartExit { .. })));
        // hyperbolic length from the centre to the margin
        let want = (1.0 - BOUNDARY_MARGIN).atanh();
        assert!((p.s_range().1 - want).abs() < 1e-8);
    }

    #[test]
    fn backward_half_uses_reversed_metric() {
        let m = ModelMetric::funk(2);
        // backward Funk distance from the centre to the boundary is ln 2
        let p = integrate_geodesic_through(&m, &[0.0, 0.0], &[1.0, 0.0], 0.5, 1.0, 1e-3).unwrap();
        assert!((p.s_range().0 + 0.5).abs() < 1e-12);
        assert_eq!(p.chart_exit, [false, false]);
        assert!(p.speed_drift(&m) < 1e-8);
        // positions increase along x through the whole path
        assert!(p.x.windows(2).all(|w| w[1][0] > w[0][0]));
        let p = q_along(&m, p).unwrap();
        assert!(p.q.iter().all(|q| (q + 0.25).abs() < 1e-6));
    }

    #[test]
    fn csv_has_expected_shape() {
        let m = ModelMetric::euclidean(2);
        let p = q_along(&m, integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], 0.002, 1e-3).unwrap()).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,x1,x2,v1,v2,Q");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 6);
    }
}
