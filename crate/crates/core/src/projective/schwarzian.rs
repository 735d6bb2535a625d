use crate::error::{FinslerError, Result};

/// Stencil spacing used for functions given as closures.
pub const STENCIL_STEP: f64 = 5e-3;

/// Spacing of the first pass that fixes the local normalisation.
const PILOT_STEP: f64 = 1e-3;

/// `|p'|` below this is treated as a critical point.
pub const CRITICAL_DP: f64 = 1e-10;

/// `{p, s} = p'''/p' - 3/2 (p''/p')^2` from the three derivatives.
pub fn schwarzian_from_derivatives(d1: f64, d2: f64, d3: f64) -> Result<f64> {
    if !(d1.abs() >= CRITICAL_DP) {
        return Err(FinslerError::CriticalPoint { dp: d1 });
    }
    let r = d2 / d1;
    Ok(d3 / d1 - 1.5 * r * r)
}

/// First three derivatives from seven equally spaced values `f[-3..=3]`.
pub fn stencil_derivatives(f: &[f64; 7], h: f64) -> (f64, f64, f64) {
    let d1 = (-f[0] + 9.0 * f[1] - 45.0 * f[2] + 45.0 * f[4] - 9.0 * f[5] + f[6]) / (60.0 * h);
    let d2 = (2.0 * f[0] - 27.0 * f[1] + 270.0 * f[2] - 490.0 * f[3] + 270.0 * f[4] - 27.0 * f[5]
        + 2.0 * f[6])
        / (180.0 * h * h);
    let d3 = (f[0] - 8.0 * f[1] + 13.0 * f[2] - 13.0 * f[4] + 8.0 * f[5] - f[6]) / (8.0 * h * h * h);
    (d1, d2, d3)
}

/// Möbius map `t -> (t - p0) / (c (t - p0) + d1)` with `c = d2 / (2 d1)`.
/// Composed with `p` it gives `q(s0) = 0`, `q' = 1`, `q'' = 0`, which keeps
/// nearby poles of `p` out of the stencil and avoids the cancellation
/// between the two terms of the Schwarzian.
struct LocalFrame {
    p0: f64,
    c: f64,
    d1: f64,
}

impl LocalFrame {
    fn new(f: &[f64; 7], h: f64) -> Result<Self> {
        let (d1, d2, _) = stencil_derivatives(f, h);
        if !(d1.abs() >= CRITICAL_DP) {
            return Err(FinslerError::CriticalPoint { dp: d1 });
        }
        Ok(Self {
            p0: f[3],
            c: d2 / (2.0 * d1),
            d1,
        })
    }

    fn map(&self, t: f64) -> f64 {
        let u = t - self.p0;
        u / (self.c * u + self.d1)
    }

    fn schwarzian(&self, f: &[f64; 7], h: f64) -> Result<f64> {
        let q: [f64; 7] = std::array::from_fn(|k| self.map(f[k]));
        let (d1, d2, d3) = stencil_derivatives(&q, h);
        schwarzian_from_derivatives(d1, d2, d3)
    }
}

/// Schwarzian of a smooth function at `s` by seven-point central stencils,
/// taken after a local Möbius normalisation.
pub fn schwarzian<F: Fn(f64) -> f64>(p: F, s: f64) -> Result<f64> {
    let sample = |h: f64| -> [f64; 7] { std::array::from_fn(|k| p(s + (k as f64 - 3.0) * h)) };
    let frame = LocalFrame::new(&sample(PILOT_STEP), PILOT_STEP)?;
    frame.schwarzian(&sample(STENCIL_STEP), STENCIL_STEP)
}

/// Plain stencil Schwarzian with spacing `h`, no normalisation.
pub fn schwarzian_direct<F: Fn(f64) -> f64>(p: F, s: f64, h: f64) -> Result<f64> {
    let f: [f64; 7] = std::array::from_fn(|k| p(s + (k as f64 - 3.0) * h));
    let (d1, d2, d3) = stencil_derivatives(&f, h);
    schwarzian_from_derivatives(d1, d2, d3)
}

/// Schwarzian of grid samples at node `i`; needs three uniformly spaced
/// neighbours on each side.
pub fn schwarzian_sampled(grid: &[f64], values: &[f64], i: usize) -> Result<f64> {
    if grid.len() != values.len() {
        return Err(FinslerError::GridMismatch(format!(
            "{} nodes but {} values",
            grid.len(),
            values.len()
        )));
    }
    if i < 3 || i + 3 >= grid.len() {
        return Err(FinslerError::GridMismatch(format!("node {i} too close to the grid edge")));
    }
    let h = grid[i + 1] - grid[i];
    let uniform = (i - 3..i + 3).all(|k| ((grid[k + 1] - grid[k]) - h).abs() <= 1e-9 * h.abs());
    if !uniform {
        return Err(FinslerError::GridMismatch(format!("grid not uniform around node {i}")));
    }
    let f: [f64; 7] = std::array::from_fn(|k| values[i + k - 3]);
    LocalFrame::new(&f, h)?.schwarzian(&f, h)
}
