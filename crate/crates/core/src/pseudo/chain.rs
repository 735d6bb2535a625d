use serde::Serialize;

use crate::error::{FinslerError, Result};
use crate::geodesic::GeodesicPath;
use crate::metric::norm;
use crate::projective::{MobiusMap, ProjectiveParameter};
use crate::sturm::{CoverInterval, EndKind, IntervalCover};

use super::funk::FunkInterval;

/// Endpoints of consecutive segments must agree to this distance in the chart.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    /// `I` mapped onto the whole range of `u` on a bounded sweep piece.
    Hilbert,
    /// `t -> (u0 + u1) / 2 + n (u1 - u0) t` on a full sweep.
    Scaling { n: u64 },
}

/// One projective map `f = x ∘ u^{-1} ∘ phi : I -> M` with its endpoints
/// `f(a)` and `f(b)`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainSegment {
    pub a: f64,
    pub b: f64,
    /// `t -> u`.
    pub phi: MobiusMap,
    /// Arc-length piece of the geodesic on which `u` is inverted.
    pub s_interval: (f64, f64),
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Chain {
    pub points: Vec<Vec<f64>>,
    pub segments: Vec<ChainSegment>,
}

impl Chain {
    pub fn single(x: Vec<f64>, y: Vec<f64>, seg: ChainSegment) -> Self {
        Self {
            points: vec![x, y],
            segments: vec![seg],
        }
    }

    /// `self` followed by `other`; the junction point is kept once.
    pub fn join(mut self, other: Chain) -> Self {
        if self.points.is_empty() {
            return other;
        }
        self.points.extend(other.points.into_iter().skip(1));
        self.segments.extend(other.segments);
        self
    }
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
    norm(&d)
}

/// `sum_i D_f(a_i, b_i)` after checking `f_i(a_i) = x_{i-1}` and `f_i(b_i) = x_i`.
pub fn chain_length(chain: &Chain, k: f64) -> Result<f64> {
    let funk = FunkInterval::new(k)?;
    if chain.points.len() != chain.segments.len() + 1 {
        return Err(FinslerError::BrokenChain {
            segment: chain.segments.len(),
            gap: f64::INFINITY,
        });
    }
    let mut total = 0.0;
    for (i, seg) in chain.segments.iter().enumerate() {
        let g = gap(&seg.start, &chain.points[i]).max(gap(&seg.end, &chain.points[i + 1]));
        if !(g <= MATCH_TOL) {
            return Err(FinslerError::BrokenChain { segment: i, gap: g });
        }
        total += funk.distance(seg.a, seg.b)?;
    }
    Ok(total)
}

/// A pole-free piece of a geodesic with its increasing coordinate `u`.
pub(crate) struct SweepPiece<'a> {
    pub path: &'a GeodesicPath,
    pub pp: &'a ProjectiveParameter,
    pub iv: &'a CoverInterval,
}

impl SweepPiece<'_> {
    pub fn u(&self, s: f64) -> f64 {
        self.iv.choice.apply(self.pp.num.eval(s), self.pp.den.eval(s))
    }

    /// Limits of `u` at the two ends, infinite unless the end is truncated.
    pub fn range(&self) -> (f64, f64) {
        let lo = match self.iv.ends[0] {
            EndKind::Truncated => self.u(self.iv.a),
            _ => f64::NEG_INFINITY,
        };
        let hi = match self.iv.ends[1] {
            EndKind::Truncated => self.u(self.iv.b),
            _ => f64::INFINITY,
        };
        (lo, hi)
    }

    /// Arc length with `u(s) = target`, by bisection.
    pub fn invert(&self, target: f64) -> Result<f64> {
        let (lo_u, hi_u) = self.range();
        if !(target > lo_u && target < hi_u) && !(target == lo_u || target == hi_u) {
            return Err(FinslerError::ParameterNotGlobal);
        }
        let (mut lo, mut hi) = (self.iv.a, self.iv.b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let u = self.u(mid);
            if u.is_nan() {
                return Err(FinslerError::ParameterNotGlobal);
            }
            if u < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn segment(&self, a: f64, b: f64, phi: MobiusMap, kind: SegmentKind) -> Result<ChainSegment> {
        let start = self.path.position_at(self.invert(phi.apply(a))?);
        let end = self.path.position_at(self.invert(phi.apply(b))?);
        Ok(ChainSegment {
            a,
            b,
            phi,
            s_interval: (self.iv.a, self.iv.b),
            start,
            end,
            kind,
        })
    }

    /// Best centred segment from `s0` to `s1`: `phi` maps `I` onto the range
    /// of `u`, so `D_f(-b, b)` is the Hilbert distance of `u(s0), u(s1)` in
    /// that range. `None` on a full sweep, where the range has no ends.
    pub fn hilbert(&self, s0: f64, s1: f64) -> Result<Option<ChainSegment>> {
        let (r0, r1) = self.range();
        if r0 == f64::NEG_INFINITY && r1 == f64::INFINITY {
            return Ok(None);
        }
        // onto (0, inf)
        let m1 = match (r0.is_finite(), r1.is_finite()) {
            (true, true) => MobiusMap { a: 1.0, b: -r0, c: -1.0, d: r1 },
            (false, true) => MobiusMap { a: 0.0, b: 1.0, c: -1.0, d: r1 },
            _ => MobiusMap { a: 1.0, b: -r0, c: 0.0, d: 1.0 },
        };
        let (x, y) = (m1.apply(self.u(s0)), m1.apply(self.u(s1)));
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(FinslerError::ParameterNotGlobal);
        }
        let lambda = 1.0 / (x * y).sqrt();
        let to_disc = MobiusMap { a: 1.0, b: -1.0, c: 1.0, d: 1.0 };
        let m = to_disc.compose(&MobiusMap { a: lambda, b: 0.0, c: 0.0, d: 1.0 }).compose(&m1);
        let phi = MobiusMap::new(m.d, -m.b, -m.c, m.a)?;
        let yn = (y / x).sqrt();
        let b = (yn - 1.0) / (yn + 1.0);
        self.segment(-b, b, phi, SegmentKind::Hilbert).map(Some)
    }

    pub fn scaling(&self, s0: f64, s1: f64, n: u64) -> Result<ChainSegment> {
        if !self.iv.full_sweep || n == 0 {
            return Err(FinslerError::ParameterNotGlobal);
        }
        let (u0, u1) = (self.u(s0), self.u(s1));
        let nf = n as f64;
        let phi = MobiusMap::new(nf * (u1 - u0), 0.5 * (u0 + u1), 0.0, 1.0)?;
        let h = 0.5 / nf;
        self.segment(-h, h, phi, SegmentKind::Scaling { n })
    }
}

/// Piece of `cover` containing both arc lengths, preferring full sweeps.
pub(crate) fn common_piece(cover: &IntervalCover, s0: f64, s1: f64) -> Option<&CoverInterval> {
    let (lo, hi) = (s0.min(s1), s0.max(s1));
    cover
        .common_full_sweep(s0, s1)
        .map(|i| &cover.intervals[i])
        .or_else(|| cover.intervals.iter().find(|iv| iv.a <= lo && hi <= iv.b))
}

/// Scaling chain from `x(s0)` to `x(s1)` on a full sweep of `cover`, with
/// `u0 = u(s0)`, `u1 = u(s1)` and `f_n(t) = x(u^{-1}((u0 + u1) / 2 + n (u1 - u0) t))`.
/// Endpoints `-1/2n` and `1/2n`, length `ln((2n + 1) / (2n - 1)) / k`.
pub fn lemma2_chain(
    path: &GeodesicPath,
    pp: &ProjectiveParameter,
    cover: &IntervalCover,
    s0: f64,
    s1: f64,
    n: u64,
) -> Result<Chain> {
    let iv = cover
        .common_full_sweep(s0, s1)
        .map(|i| &cover.intervals[i])
        .ok_or(FinslerError::ParameterNotGlobal)?;
    let piece = SweepPiece { path, pp, iv };
    let seg = piece.scaling(s0, s1, n)?;
    Ok(Chain::single(path.position_at(s0), path.position_at(s1), seg))
}
