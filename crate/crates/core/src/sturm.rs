//! Zeros, oscillation verdicts, principal solutions and the decomposition of
//! a geodesic into intervals on which a projective parameter sweeps the line.

use serde::Serialize;

use crate::error::{FinslerError, Result};
use crate::geodesic::GeodesicPath;
use crate::projective::{solve_linear_ode_at, uniform_grid, wronskian, LinearOdeSolution, ProjectiveParameter, SampledQ};

pub const DEFAULT_WINDOW: (f64, f64) = (-40.0, 40.0);

/// Grid spacing for window scans.
pub const SCAN_STEP: f64 = 1e-2;

/// Relative Wronskian below which two solutions count as proportional.
pub const PROPORTIONAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "+inf")]
    PlusInfinity,
    #[serde(rename = "-inf")]
    MinusInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Oscillatory,
    Nonoscillatory,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    pub direction: Direction,
    pub verdict: Verdict,
    pub zeros: Vec<f64>,
    pub window: (f64, f64),
}

/// Zeros of a sampled solution, refined on its Hermite interpolant.
/// Tangential zeros cannot occur for a nontrivial solution; a sample with
/// `y = y' = 0` is dropped.
pub fn find_zeros(sol: &LinearOdeSolution) -> Vec<f64> {
    let scale = sol.yp.iter().chain(&sol.y).fold(0.0f64, |m, v| m.max(v.abs()));
    sol.zeros()
        .into_iter()
        .filter(|&z| {
            let i = sol.s_grid.iter().position(|&s| s == z);
            i.map_or(true, |i| sol.yp[i].abs() > 1e-14 * scale)
        })
        .collect()
}

/// `true` if exactly one element of `b` lies strictly between each pair of
/// consecutive elements of `a`.
pub fn interlaces(a: &[f64], b: &[f64]) -> bool {
    a.windows(2)
        .all(|w| b.iter().filter(|&&z| z > w[0] && z < w[1]).count() == 1)
}

/// `y' / y` where `y != 0`.
pub fn riccati_ratio(sol: &LinearOdeSolution) -> Vec<Option<f64>> {
    sol.y
        .iter()
        .zip(&sol.yp)
        .map(|(y, yp)| (*y != 0.0).then(|| yp / y))
        .collect()
}

fn oriented<F: Fn(f64) -> f64>(q: &F, direction: Direction, window: (f64, f64)) -> Result<SampledQ> {
    let (a, b) = window;
    match direction {
        Direction::PlusInfinity => SampledQ::from_fn(uniform_grid(a, b, SCAN_STEP), q),
        Direction::MinusInfinity => SampledQ::from_fn(uniform_grid(-b, -a, SCAN_STEP), |t| q(-t)),
    }
}

fn unorient(z: &[f64], direction: Direction) -> Vec<f64> {
    match direction {
        Direction::PlusInfinity => z.to_vec(),
        Direction::MinusInfinity => z.iter().rev().map(|v| -v).collect(),
    }
}

/// Finite-window verdict for `y'' + Q y = 0` toward `direction`.
///
/// A solution vanishing at the far end of the window is scanned toward the
/// analysed end. Oscillatory: at least three zeros and the last one within
/// two gaps of the edge. Nonoscillatory: a zero-free tail of at least half
/// the window on which `|y|` grows. Anything else is Inconclusive.
pub fn classify_oscillation<F: Fn(f64) -> f64>(q: F, direction: Direction, window: (f64, f64)) -> OscillationReport {
    let verdict_of = |zeros: &[f64], sol: &LinearOdeSolution, lo: f64, hi: f64| {
        let len = hi - lo;
        let last = zeros.last().copied().unwrap_or(lo);
        let gaps: Vec<f64> = zeros.windows(2).map(|w| w[1] - w[0]).collect();
        if zeros.len() >= 3 {
            let gap = gaps[gaps.len() - 1].max(gaps[gaps.len() - 2]);
            if hi - last <= 2.0 * gap {
                return Verdict::Oscillatory;
            }
        }
        if hi - last >= 0.5 * len {
            let start = sol.s_grid.iter().position(|&s| s > last).unwrap_or(sol.s_grid.len());
            let growing = sol.y[start..].windows(2).all(|w| w[1].abs() >= w[0].abs());
            if growing && start < sol.s_grid.len() {
                return Verdict::Nonoscillatory;
            }
        }
        Verdict::Inconclusive
    };
    let (zeros, verdict) = match oriented(&q, direction, window)
        .and_then(|g| solve_linear_ode_at(&g, 0, 0.0, 1.0))
    {
        Ok(sol) => {
            let zeros = find_zeros(&sol);
            let (lo, hi) = (sol.s_grid[0], sol.s_grid[sol.s_grid.len() - 1]);
            let v = verdict_of(&zeros, &sol, lo, hi);
            (unorient(&zeros, direction), v)
        }
        Err(_) => (Vec::new(), Verdict::Inconclusive),
    };
    OscillationReport {
        direction,
        verdict,
        zeros,
        window,
    }
}

/// [`classify_oscillation`] on [`DEFAULT_WINDOW`], doubled once if the first
/// verdict is Inconclusive.
pub fn classify_oscillation_auto<F: Fn(f64) -> f64>(q: F, direction: Direction) -> OscillationReport {
    let first = classify_oscillation(&q, direction, DEFAULT_WINDOW);
    if first.verdict != Verdict::Inconclusive {
        return first;
    }
    let (a, b) = DEFAULT_WINDOW;
    classify_oscillation(&q, direction, (2.0 * a, 2.0 * b))
}

/// Initial data at the far edge on the decaying Riccati branch,
/// `y' / y = -sqrt(max(-Q, 0))`, oriented toward `direction`.
fn principal_init(q_edge: f64, direction: Direction) -> (f64, f64) {
    let k = (-q_edge).max(0.0).sqrt();
    match direction {
        Direction::PlusInfinity => (1.0, -k),
        Direction::MinusInfinity => (1.0, k),
    }
}

/// Principal solution toward `direction` on a sampled grid, by integration
/// inward from the corresponding edge, where the decaying branch is attracting.
pub fn principal_on_grid(q: &SampledQ, direction: Direction) -> Result<LinearOdeSolution> {
    let (idx, qe) = match direction {
        Direction::PlusInfinity => (q.len() - 1, q.q[q.len() - 1]),
        Direction::MinusInfinity => (0, q.q[0]),
    };
    let (y0, yp0) = principal_init(qe, direction);
    solve_linear_ode_at(q, idx, y0, yp0)
}

/// Principal solution toward `direction` on `window`; errors unless the
/// window verdict is Nonoscillatory.
pub fn principal_solution<F: Fn(f64) -> f64>(
    q: F,
    direction: Direction,
    window: (f64, f64),
) -> Result<LinearOdeSolution> {
    let report = classify_oscillation(&q, direction, window);
    if report.verdict != Verdict::Nonoscillatory {
        return Err(FinslerError::NotNonoscillatory);
    }
    let grid = SampledQ::from_fn(uniform_grid(window.0, window.1, SCAN_STEP), &q)?;
    principal_on_grid(&grid, direction)
}

/// `|principal / other|` at the edge toward `direction`.
pub fn principal_ratio(principal: &LinearOdeSolution, other: &LinearOdeSolution, direction: Direction) -> f64 {
    let i = match direction {
        Direction::PlusInfinity => principal.y.len() - 1,
        Direction::MinusInfinity => 0,
    };
    (principal.y[i] / other.y[i]).abs()
}

/// `true` if `a` and `b` are proportional, by their relative Wronskian.
pub fn proportional(a: &LinearOdeSolution, b: &LinearOdeSolution) -> bool {
    let w = wronskian(a, b);
    let i = a.anchor;
    let scale = (a.y[i].abs() + a.yp[i].abs()) * (b.y[i].abs() + b.yp[i].abs());
    w[i].abs() <= PROPORTIONAL_TOL * scale
}

/// Solution pair per the end behaviour of `y'' + Q y = 0`:
/// the denominator is principal at `+inf` when nonoscillatory there (else at
/// `-inf` when only that end is nonoscillatory), the numerator principal at
/// `-inf` when both ends are nonoscillatory and that gives an independent
/// solution. Oscillatory cases use the canonical pair at the first node.
pub fn adapted_parameter(q: &SampledQ, minus: Verdict, plus: Verdict) -> Result<ProjectiveParameter> {
    use Verdict::Nonoscillatory as N;
    let last = q.len() - 1;
    let (mut num, den) = match (minus, plus) {
        (_, N) => {
            let den = principal_on_grid(q, Direction::PlusInfinity)?;
            let num = if minus == N {
                let p = principal_on_grid(q, Direction::MinusInfinity)?;
                if proportional(&p, &den) {
                    solve_linear_ode_at(q, 0, 0.0, 1.0)?
                } else {
                    p
                }
            } else {
                solve_linear_ode_at(q, last, 0.0, 1.0)?
            };
            (num, den)
        }
        (N, _) => (
            solve_linear_ode_at(q, 0, 0.0, 1.0)?,
            principal_on_grid(q, Direction::MinusInfinity)?,
        ),
        _ => (
            solve_linear_ode_at(q, 0, 0.0, 1.0)?,
            solve_linear_ode_at(q, 0, 1.0, 0.0)?,
        ),
    };
    if wronskian(&num, &den)[num.anchor] < 0.0 {
        num = num.combine(-1.0, &den, 0.0);
    }
    ProjectiveParameter::from_pair(num, den, q.q.clone())
}

/// Which ratio of the pair serves as `u` on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParamChoice {
    /// `y1 / y2`
    Ratio,
    /// `-y1 / y2`
    NegRatio,
    /// `y2 / y1`
    InvRatio,
    /// `-y2 / y1`
    NegInvRatio,
}

impl ParamChoice {
    pub fn apply(self, y1: f64, y2: f64) -> f64 {
        match self {
            Self::Ratio => y1 / y2,
            Self::NegRatio => -y1 / y2,
            Self::InvRatio => y2 / y1,
            Self::NegInvRatio => -y2 / y1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndKind {
    /// `u` diverges at a zero of the denominator.
    Pole,
    /// Window edge where `u` diverges in the limit: the denominator is the
    /// principal solution there.
    Infinite,
    /// Window edge where `u` stays bounded or the window cuts the sweep.
    Truncated,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverInterval {
    pub a: f64,
    pub b: f64,
    pub choice: ParamChoice,
    pub ends: [EndKind; 2],
    /// `u` runs over the whole line on `(a, b)`.
    pub full_sweep: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalCover {
    pub intervals: Vec<CoverInterval>,
    pub window: (f64, f64),
}

impl IntervalCover {
    /// Index of a full-sweep interval containing both `s` and `t`.
    pub fn common_full_sweep(&self, s: f64, t: f64) -> Option<usize> {
        let (lo, hi) = (s.min(t), s.max(t));
        self.intervals
            .iter()
            .position(|iv| iv.full_sweep && iv.a < lo && hi < iv.b)
    }
}

fn edge_kind(pp: &ProjectiveParameter, verdict: Verdict, direction: Direction) -> Result<EndKind> {
    if verdict != Verdict::Nonoscillatory {
        return Ok(EndKind::Truncated);
    }
    let q = SampledQ::new(pp.s_grid.clone(), pp.q.clone())?;
    let principal = principal_on_grid(&q, direction)?;
    Ok(if proportional(&principal, &pp.den) {
        EndKind::Infinite
    } else {
        EndKind::Truncated
    })
}

/// Splits the window of `pp` at the poles of `p`. Each piece carries the
/// sign choice making `u` increase and the kind of its two ends; pieces
/// bounded by poles or by infinite ends are full sweeps. Overlaps are kept.
pub fn interval_decomposition(
    pp: &ProjectiveParameter,
    reports: (&OscillationReport, &OscillationReport),
) -> Result<IntervalCover> {
    let (lo, hi) = (pp.s_grid[0], pp.s_grid[pp.len() - 1]);
    let left = edge_kind(pp, reports.0.verdict, Direction::MinusInfinity)?;
    let right = edge_kind(pp, reports.1.verdict, Direction::PlusInfinity)?;
    let w = pp.wronskian()[pp.num.anchor];
    let choice = if w >= 0.0 { ParamChoice::Ratio } else { ParamChoice::NegRatio };

    let mut cuts = vec![(lo, left)];
    cuts.extend(
        pp.poles
            .iter()
            .filter(|&&z| z > lo && z < hi)
            .map(|&z| (z, EndKind::Pole)),
    );
    cuts.push((hi, right));
    let intervals: Vec<CoverInterval> = cuts
        .windows(2)
        .map(|c| {
            let ends = [c[0].1, c[1].1];
            CoverInterval {
                a: c[0].0,
                b: c[1].0,
                choice,
                ends,
                full_sweep: ends.iter().all(|e| *e != EndKind::Truncated),
            }
        })
        .collect();

    let mut reach = lo;
    for iv in &intervals {
        if iv.a > reach {
            return Err(FinslerError::CoverageGap { from: reach, to: iv.a });
        }
        reach = reach.max(iv.b);
    }
    if reach < hi {
        return Err(FinslerError::CoverageGap { from: reach, to: hi });
    }
    Ok(IntervalCover {
        intervals,
        window: (lo, hi),
    })
}

/// Both verdicts for the `Q` samples of a path, with `Q` continued beyond
/// the path by its edge values.
pub fn path_oscillation(path: &GeodesicPath) -> Result<(OscillationReport, OscillationReport)> {
    let q = SampledQ::from_path(path)?;
    let (lo, hi) = path.s_range();
    let ext = |t: f64| q.eval(t.clamp(lo, hi));
    Ok((
        classify_oscillation_auto(ext, Direction::MinusInfinity),
        classify_oscillation_auto(ext, Direction::PlusInfinity),
    ))
}

/// [`interval_decomposition`] for a parameter along `path`; ends where the
/// path stopped at the chart boundary never count as infinite.
pub fn path_cover(
    path: &GeodesicPath,
    pp: &ProjectiveParameter,
    reports: (&OscillationReport, &OscillationReport),
) -> Result<IntervalCover> {
    let mut cover = interval_decomposition(pp, reports)?;
    let last = cover.intervals.len() - 1;
    for (side, iv) in [(0, 0), (1, last)] {
        if path.chart_exit[side] {
            let iv = &mut cover.intervals[iv];
            iv.ends[side] = EndKind::Truncated;
            iv.full_sweep = false;
        }
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::solve_linear_ode;
    use std::f64::consts::PI;

    fn constant_grid(q: f64, a: f64, b: f64, h: f64) -> SampledQ {
        SampledQ::constant(uniform_grid(a, b, h), q).unwrap()
    }

    #[test]
    fn zeros_of_known_solutions() {
        let cos = solve_linear_ode(&constant_grid(1.0, 0.0, 10.0, 1e-3), 1.0, 0.0).unwrap();
        let z = find_zeros(&cos);
        assert_eq!(z.len(), 3);
        for (k, r) in z.iter().enumerate() {
            assert!((r - (k as f64 + 0.5) * PI).abs() <= 1e-8);
        }
        let lin = solve_linear_ode(&constant_grid(0.0, -1.0, 1.0, 1e-3), 0.0, 1.0).unwrap();
        assert_eq!(find_zeros(&lin), vec![0.0]);
        let q = constant_grid(-1.0, 0.0, 3.0, 1e-3);
        let sinh = solve_linear_ode_at(&q, 1000, 0.0, 1.0).unwrap();
        let z = find_zeros(&sinh);
        assert_eq!(z.len(), 1);
        assert!((z[0] - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn verdicts_for_constant_q() {
        for dir in [Direction::PlusInfinity, Direction::MinusInfinity] {
            let r = classify_oscillation_auto(|_| 1.0, dir);
            assert_eq!(r.verdict, Verdict::Oscillatory);
            let gaps: Vec<f64> = r.zeros.windows(2).map(|w| w[1] - w[0]).collect();
            assert!(gaps.iter().all(|g| (g - PI).abs() < 1e-8));
            assert_eq!(classify_oscillation_auto(|_| -1.0, dir).verdict, Verdict::Nonoscillatory);
            assert_eq!(classify_oscillation_auto(|_| 0.0, dir).verdict, Verdict::Nonoscillatory);
            assert_eq!(classify_oscillation_auto(|_| -0.25, dir).verdict, Verdict::Nonoscillatory);
        }
    }

    #[test]
    fn mixed_q_is_inconclusive_or_one_sided() {
        let q = |s: f64| if s < 20.0 { 1.0 } else { -1.0 };
        let r = classify_oscillation_auto(q, Direction::PlusInfinity);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.window, (-80.0, 80.0));
        let r = classify_oscillation_auto(q, Direction::MinusInfinity);
        assert_eq!(r.verdict, Verdict::Oscillatory);
    }

    #[test]
    fn principal_solutions() {
        let w = DEFAULT_WINDOW;
        let other = |q: f64| solve_linear_ode_at(&constant_grid(q, w.0, w.1, SCAN_STEP), 0, 0.0, 1.0).unwrap();
        for q in [-1.0, -0.25] {
            let p = principal_solution(|_| q, Direction::PlusInfinity, w).unwrap();
            let k = (-q as f64).sqrt();
            let want = (k * (w.1 - 20.0)).exp();
            let i = p.s_grid.iter().position(|s| (s - 20.0).abs() < 1e-9).unwrap();
            assert!((p.y[i] / want - 1.0).abs() < 1e-7, "{} {}", p.y[i], want);
            assert!(principal_ratio(&p, &other(q), Direction::PlusInfinity) <= 1e-4);
        }
        // Q = 0: the ratio 1 / (s - a) decays only algebraically
        let p = principal_solution(|_| 0.0, Direction::PlusInfinity, w).unwrap();
        assert!(p.y.iter().all(|y| (y - 1.0).abs() < 1e-12));
        let r = principal_ratio(&p, &other(0.0), Direction::PlusInfinity);
        assert!((r - 1.0 / 80.0).abs() < 1e-12);
        let p = principal_solution(|_| -1.0, Direction::MinusInfinity, w).unwrap();
        let g = constant_grid(-1.0, w.0, w.1, SCAN_STEP);
        let far = solve_linear_ode_at(&g, g.len() - 1, 0.0, 1.0).unwrap();
        assert!(principal_ratio(&p, &far, Direction::MinusInfinity) <= 1e-4);
        assert!((p.y[0] - 1.0).abs() < 1e-12 && (p.yp[0] - 1.0).abs() < 1e-12);
        assert!(matches!(
            principal_solution(|_| 1.0, Direction::PlusInfinity, w),
            Err(FinslerError::NotNonoscillatory)
        ));
    }

    #[test]
    fn sturm_separation() {
        let q = constant_grid(1.0, 0.0, 30.0, 1e-3);
        let a = find_zeros(&solve_linear_ode(&q, 1.0, 0.3).unwrap());
        let b = find_zeros(&solve_linear_ode(&q, -0.4, 1.0).unwrap());
        assert!(interlaces(&a, &b) && interlaces(&b, &a));
        assert!(a.len() >= 9);
    }

    #[test]
    fn comparison_of_riccati_ratios() {
        // Q1 = 1 >= Q2 = 0 with matched y'/y at s = 0
        let q1 = constant_grid(1.0, 0.0, 1.0, 1e-3);
        let q2 = constant_grid(0.0, 0.0, 1.0, 1e-3);
        let r1 = riccati_ratio(&solve_linear_ode(&q1, 1.0, 0.5).unwrap());
        let r2 = riccati_ratio(&solve_linear_ode(&q2, 1.0, 0.5).unwrap());
        for (a, b) in r1.iter().zip(&r2).skip(1) {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert!(a <= b + 1e-8);
        }
    }

    #[test]
    fn non_principal_solutions_vanish() {
        // Q = 0: principal solution is constant; every independent solution has a zero
        let q = constant_grid(0.0, -40.0, 40.0, SCAN_STEP);
        let principal = principal_on_grid(&q, Direction::PlusInfinity).unwrap();
        assert!(find_zeros(&principal).is_empty());
        for c in [-30.0, -5.0, 0.0, 12.5, 35.0] {
            let anchor = q.s.iter().position(|s| (s - c).abs() < 1e-9).unwrap();
            let y = solve_linear_ode_at(&q, anchor, 0.0, 1.0).unwrap();
            let y = y.combine(1.0, &principal, 0.0);
            assert!(!proportional(&y, &principal));
            let z = find_zeros(&y);
            assert_eq!(z.len(), 1);
            assert!((z[0] - c).abs() < 1e-9);
        }
    }

    #[test]
    fn positive_q_forces_a_zero() {
        let q = constant_grid(1.0, 0.0, 10.0, 1e-3);
        for (y0, yp0) in [(1.0, 0.0), (0.3, 2.0), (-1.0, -1.0)] {
            assert!(!find_zeros(&solve_linear_ode(&q, y0, yp0).unwrap()).is_empty());
        }
    }

    fn cover(q: f64) -> IntervalCover {
        let g = constant_grid(q, -40.0, 40.0, SCAN_STEP);
        let minus = classify_oscillation_auto(|_| q, Direction::MinusInfinity);
        let plus = classify_oscillation_auto(|_| q, Direction::PlusInfinity);
        let pp = adapted_parameter(&g, minus.verdict, plus.verdict).unwrap();
        interval_decomposition(&pp, (&minus, &plus)).unwrap()
    }

    #[test]
    fn harmonic_cover_has_pi_intervals() {
        let c = cover(1.0);
        let inner: Vec<&CoverInterval> = c.intervals.iter().filter(|iv| iv.full_sweep).collect();
        assert!(inner.len() >= 24);
        assert!(inner.iter().all(|iv| (iv.b - iv.a - PI).abs() < 1e-8));
        assert_eq!(c.intervals.first().unwrap().ends[0], EndKind::Truncated);
    }

    #[test]
    fn flat_cover_is_one_sweep() {
        let c = cover(0.0);
        assert_eq!(c.intervals.len(), 1);
        assert!(c.intervals[0].full_sweep);
        assert_eq!(c.intervals[0].ends, [EndKind::Infinite, EndKind::Infinite]);
    }

    #[test]
    fn hyperbolic_cover_does_not_sweep() {
        let c = cover(-1.0);
        assert_eq!(c.intervals.len(), 1);
        assert!(!c.intervals[0].full_sweep);
        assert_eq!(c.intervals[0].ends, [EndKind::Truncated, EndKind::Infinite]);
        assert!(c.common_full_sweep(-1.0, 1.0).is_none());
    }
}
