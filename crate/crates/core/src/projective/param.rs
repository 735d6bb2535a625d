use std::io::{self, Write};

use serde::Serialize;

use crate::error::{FinslerError, Result};
use crate::geodesic::{fmt_f64, GeodesicPath};

use super::mobius::MobiusMap;
use super::ode::{nearest_node, solve_linear_ode_at, wronskian, LinearOdeSolution, SampledQ};
use super::schwarzian::{schwarzian_from_derivatives, stencil_derivatives, CRITICAL_DP};

/// Samples with `|p|` beyond this are recorded as poles.
const POLE_MAGNITUDE: f64 = 1e12;

/// `p = y1 / y2` for two solutions of `y'' + Q y = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectiveParameter {
    pub s_grid: Vec<f64>,
    /// `None` marks a pole sample.
    pub p_samples: Vec<Option<f64>>,
    /// Numerator `y1`.
    pub num: LinearOdeSolution,
    /// Denominator `y2`.
    pub den: LinearOdeSolution,
    /// Zeros of `y2`.
    pub poles: Vec<f64>,
    pub q: Vec<f64>,
}

impl ProjectiveParameter {
    pub fn from_pair(num: LinearOdeSolution, den: LinearOdeSolution, q: Vec<f64>) -> Result<Self> {
        if num.s_grid.len() != den.s_grid.len() || q.len() != num.s_grid.len() {
            return Err(FinslerError::GridMismatch("solutions on different grids".into()));
        }
        let p_samples = num
            .y
            .iter()
            .zip(&den.y)
            .map(|(a, b)| {
                let p = a / b;
                (p.abs() < POLE_MAGNITUDE).then_some(p)
            })
            .collect();
        let poles = den.zeros();
        Ok(Self {
            s_grid: num.s_grid.clone(),
            p_samples,
            num,
            den,
            poles,
            q,
        })
    }

    /// Canonical pair anchored at node `anchor`: `y2 = (1, 0)`, `y1 = (0, 1)`,
    /// so `W = 1` and `p(s_anchor) = 0`.
    pub fn canonical_at(q: &SampledQ, anchor: usize) -> Result<Self> {
        let num = solve_linear_ode_at(q, anchor, 0.0, 1.0)?;
        let den = solve_linear_ode_at(q, anchor, 1.0, 0.0)?;
        Self::from_pair(num, den, q.q.clone())
    }

    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    pub fn wronskian(&self) -> Vec<f64> {
        wronskian(&self.num, &self.den)
    }

    /// `max |W(s) - W(anchor)|`.
    pub fn wronskian_drift(&self) -> f64 {
        let w = self.wronskian();
        let w0 = w[self.num.anchor];
        w.iter().map(|v| (v - w0).abs()).fold(0.0, f64::max)
    }

    /// `p' = W / y2^2` on the grid.
    pub fn p_prime(&self) -> Vec<f64> {
        self.wronskian()
            .iter()
            .zip(&self.den.y)
            .map(|(w, d)| w / (d * d))
            .collect()
    }

    /// Interpolated `p(s)`; `None` at a pole.
    pub fn eval(&self, s: f64) -> Option<f64> {
        let p = self.num.eval(s) / self.den.eval(s);
        (p.abs() < POLE_MAGNITUDE).then_some(p)
    }

    pub fn distance_to_pole(&self, s: f64) -> f64 {
        self.poles.iter().map(|z| (z - s).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Stencil Schwarzian at node `i`. The stencil runs on `q = z1 / z2`,
    /// where `(z1, z2)` is the pair re-anchored at node `i` with
    /// `z2 = (1, 0)` and `z1 = (0, 1)` there. `q` is a Möbius image of `p`
    /// with `q(s_i) = 0`, `q' = 1`, `q'' = 0`, so poles of `p` nearby do not
    /// affect the stencil.
    pub fn schwarzian_at(&self, i: usize) -> Result<f64> {
        if i < 3 || i + 3 >= self.len() {
            return Err(FinslerError::GridMismatch(format!("node {i} too close to the grid edge")));
        }
        let (n, np) = (self.num.y_dd(i), self.num.yp_dd(i));
        let (d, dp) = (self.den.y_dd(i), self.den.yp_dd(i));
        let det = n * dp - d * np;
        if det.hi().abs() < CRITICAL_DP {
            return Err(FinslerError::CriticalPoint { dp: det.hi() });
        }
        // z2 = (dp n - np d) / det, z1 = (n d_k - d n_k) / det at node k
        let vals: [f64; 7] = std::array::from_fn(|k| {
            let j = i + k - 3;
            let (nj, dj) = (self.num.y_dd(j), self.den.y_dd(j));
            let z2 = dp * nj - np * dj;
            let z1 = n * dj - d * nj;
            (z1 / z2).hi()
        });
        let h = self.s_grid[i + 1] - self.s_grid[i];
        let (d1, d2, d3) = stencil_derivatives(&vals, h);
        if !self.s_grid[i - 3..=i + 3].windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h) {
            return Err(FinslerError::GridMismatch(format!("grid not uniform around node {i}")));
        }
        schwarzian_from_derivatives(d1, d2, d3)
    }

    /// CSV with columns `s, y1, y2, p, pole, Q, schwarzian`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "s,y1,y2,p,pole,Q,schwarzian")?;
        for i in 0..self.len() {
            let (p, pole) = match self.p_samples[i] {
                Some(p) => (fmt_f64(p), 0),
                None => (String::new(), 1),
            };
            let sch = self.schwarzian_at(i).map(fmt_f64).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_f64(self.s_grid[i]),
                fmt_f64(self.num.y[i]),
                fmt_f64(self.den.y[i]),
                p,
                pole,
                fmt_f64(self.q[i]),
                sch
            )?;
        }
        Ok(())
    }
}

/// Canonical projective parameter along a path with `Q` samples, anchored
/// at the node nearest `s = 0`.
pub fn projective_parameter(path: &GeodesicPath) -> Result<ProjectiveParameter> {
    let q = SampledQ::from_path(path)?;
    ProjectiveParameter::canonical_at(&q, nearest_node(&q.s, 0.0))
}

/// As [`projective_parameter`], anchored at the node nearest `s`.
pub fn projective_parameter_at(path: &GeodesicPath, s: f64) -> Result<ProjectiveParameter> {
    let q = SampledQ::from_path(path)?;
    ProjectiveParameter::canonical_at(&q, nearest_node(&q.s, s))
}

/// `(a p + b) / (c p + d)`, realised on the solution pair so poles move too.
pub fn mobius_apply(mu: &MobiusMap, p: &ProjectiveParameter) -> Result<ProjectiveParameter> {
    let mu = MobiusMap::new(mu.a, mu.b, mu.c, mu.d)?;
    let num = p.num.combine(mu.a, &p.den, mu.b);
    let den = p.num.combine(mu.c, &p.den, mu.d);
    ProjectiveParameter::from_pair(num, den, p.q.clone())
}
