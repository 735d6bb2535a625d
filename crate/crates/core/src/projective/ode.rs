use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{FinslerError, Result};
use crate::geodesic::{hermite_basis, locate, GeodesicPath};

/// `Q` sampled on a grid, cubically interpolated between nodes.
#[derive(Debug, Clone, Serialize)]
pub struct SampledQ {
    pub s: Vec<f64>,
    pub q: Vec<f64>,
}

impl SampledQ {
    pub fn new(s: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if s.len() != q.len() || s.len() < 2 {
            return Err(FinslerError::GridMismatch(format!(
                "{} grid nodes but {} Q samples",
                s.len(),
                q.len()
            )));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FinslerError::GridMismatch("grid is not increasing".into()));
        }
        Ok(Self { s, q })
    }

    pub fn from_path(path: &GeodesicPath) -> Result<Self> {
        if path.q.is_empty() {
            return Err(FinslerError::GridMismatch("path has no Q samples".into()));
        }
        Self::new(path.s.clone(), path.q.clone())
    }

    pub fn from_fn(s: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let q = s.iter().map(|&t| f(t)).collect();
        Self::new(s, q)
    }

    pub fn constant(s: Vec<f64>, q: f64) -> Result<Self> {
        Self::from_fn(s, |_| q)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Cubic Lagrange interpolation through the four nearest nodes.
    pub fn eval(&self, s: f64) -> f64 {
        let n = self.s.len();
        if n < 4 {
            let i = locate(&self.s, s);
            let t = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
            return self.q[i] + t * (self.q[i + 1] - self.q[i]);
        }
        let i = locate(&self.s, s).saturating_sub(1).min(n - 4);
        let xs = &self.s[i..i + 4];
        let mut acc = 0.0;
        for j in 0..4 {
            let mut l = 1.0;
            for k in 0..4 {
                if k != j {
                    l *= (s - xs[k]) / (xs[j] - xs[k]);
                }
            }
            acc += l * self.q[i + j];
        }
        acc
    }
}

/// Uniform grid on `[a, b]` with spacing close to `h`, both ends included.
pub fn uniform_grid(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).round().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Solution of `y'' + Q y = 0` sampled on the grid of its `Q`.
#[derive(Debug, Clone, Serialize)]
pub struct LinearOdeSolution {
    pub s_grid: Vec<f64>,
    pub y: Vec<f64>,
    pub yp: Vec<f64>,
    /// `(y, y')` at the anchor node.
    pub init: (f64, f64),
    pub anchor: usize,
    #[serde(skip)]
    y_lo: Vec<f64>,
    #[serde(skip)]
    yp_lo: Vec<f64>,
}

impl LinearOdeSolution {
    fn from_parts(s_grid: Vec<f64>, y: Vec<TwoFloat>, yp: Vec<TwoFloat>, init: (f64, f64), anchor: usize) -> Self {
        Self {
            s_grid,
            y: y.iter().map(TwoFloat::hi).collect(),
            y_lo: y.iter().map(TwoFloat::lo).collect(),
            yp: yp.iter().map(TwoFloat::hi).collect(),
            yp_lo: yp.iter().map(TwoFloat::lo).collect(),
            init,
            anchor,
        }
    }

    pub(crate) fn y_dd(&self, i: usize) -> TwoFloat {
        TwoFloat::new_add(self.y[i], self.y_lo[i])
    }

    pub(crate) fn yp_dd(&self, i: usize) -> TwoFloat {
        TwoFloat::new_add(self.yp[i], self.yp_lo[i])
    }

    /// Cubic Hermite value at `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let i = locate(&self.s_grid, s);
        let h = self.s_grid[i + 1] - self.s_grid[i];
        let t = (s - self.s_grid[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.y[i] + h10 * h * self.yp[i] + h01 * self.y[i + 1] + h11 * h * self.yp[i + 1]
    }

    /// `a * self + b * other`, again a solution on the same grid.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let n = self.y.len();
        let y = (0..n).map(|i| self.y_dd(i) * a + other.y_dd(i) * b).collect();
        let yp = (0..n).map(|i| self.yp_dd(i) * a + other.yp_dd(i) * b).collect();
        let init = (
            a * self.init.0 + b * other.init.0,
            a * self.init.1 + b * other.init.1,
        );
        Self::from_parts(self.s_grid.clone(), y, yp, init, self.anchor)
    }

    /// Roots of the Hermite interpolant, located to `1e-12` in `s`.
    pub fn zeros(&self) -> Vec<f64> {
        hermite_roots(&self.s_grid, &self.y, &self.yp)
    }
}

/// `W = b.y * a.y' - a.y * b.y'`, so that `(a / b)' = W / b^2`.
pub fn wronskian(a: &LinearOdeSolution, b: &LinearOdeSolution) -> Vec<f64> {
    (0..a.y.len())
        .map(|i| (b.y_dd(i) * a.yp_dd(i) - a.y_dd(i) * b.yp_dd(i)).hi())
        .collect()
}

pub(crate) fn hermite_roots(grid: &[f64], y: &[f64], yp: &[f64]) -> Vec<f64> {
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b) = (y[i], y[i + 1]);
        if a == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if a * b >= 0.0 {
            continue;
        }
        let h = grid[i + 1] - grid[i];
        let f = |t: f64| {
            let (h00, h10, h01, h11) = hermite_basis(t);
            h00 * a + h10 * h * yp[i] + h01 * b + h11 * h * yp[i + 1]
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        while (hi - lo) * h > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * a > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(grid[i] + 0.5 * (lo + hi) * h);
    }
    if y[y.len() - 1] == 0.0 {
        roots.push(grid[grid.len() - 1]);
    }
    roots
}

fn rk4_sweep(q: &SampledQ, from: usize, forward: bool, y: &mut [TwoFloat], yp: &mut [TwoFloat]) {
    let mut i = from;
    loop {
        let j = if forward {
            if i + 1 >= q.len() {
                break;
            }
            i + 1
        } else {
            if i == 0 {
                break;
            }
            i - 1
        };
        let h = TwoFloat::new_sub(q.s[j], q.s[i]);
        let half = h / 2.0;
        let (qa, qm, qb) = (q.q[i], q.eval(0.5 * (q.s[i] + q.s[j])), q.q[j]);
        let (u, v) = (y[i], yp[i]);
        let k1 = (v, -(u * qa));
        let k2 = (v + half * k1.1, -((u + half * k1.0) * qm));
        let k3 = (v + half * k2.1, -((u + half * k2.0) * qm));
        let k4 = (v + h * k3.1, -((u + h * k3.0) * qb));
        let sixth = h / 6.0;
        y[j] = u + sixth * (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0);
        yp[j] = v + sixth * (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1);
        i = j;
    }
}

/// RK4 solution of `y'' + Q y = 0` with `(y, y') = (y0, yp0)` at the node
/// nearest `s = 0` (or the first node if `0` is outside the grid).
pub fn solve_linear_ode(q: &SampledQ, y0: f64, yp0: f64) -> Result<LinearOdeSolution> {
    solve_linear_ode_at(q, nearest_node(&q.s, 0.0), y0, yp0)
}

/// As [`solve_linear_ode`], with the initial data at grid node `anchor`.
pub fn solve_linear_ode_at(q: &SampledQ, anchor: usize, y0: f64, yp0: f64) -> Result<LinearOdeSolution> {
    if anchor >= q.len() {
        return Err(FinslerError::GridMismatch(format!(
            "anchor {anchor} outside a grid of {} nodes",
            q.len()
        )));
    }
    if q.q.iter().any(|v| !v.is_finite()) {
        return Err(FinslerError::GridMismatch("non-finite Q sample".into()));
    }
    let n = q.len();
    let mut y = vec![TwoFloat::from(0.0); n];
    let mut yp = y.clone();
    y[anchor] = y0.into();
    yp[anchor] = yp0.into();
    rk4_sweep(q, anchor, true, &mut y, &mut yp);
    rk4_sweep(q, anchor, false, &mut y, &mut yp);
    Ok(LinearOdeSolution::from_parts(q.s.clone(), y, yp, (y0, yp0), anchor))
}

/// Grid index closest to `s`, or the nearer end if `s` is outside.
pub fn nearest_node(grid: &[f64], s: f64) -> usize {
    let i = locate(grid, s);
    if (grid[i + 1] - s).abs() < (s - grid[i]).abs() {
        i + 1
    } else {
        i
    }
}
