use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FinslerError, Result};
use crate::geodesic::{integrate_geodesic_through, q_along, GeodesicPath};
use crate::metric::{norm, FinslerMetric};
use crate::projective::{nearest_node, ProjectiveParameter, SampledQ};
use crate::sturm::{adapted_parameter, path_cover, path_oscillation, IntervalCover, OscillationReport};

use super::chain::{chain_length, common_piece, Chain, SweepPiece};
use super::shoot::{shoot_geodesic, ShotGeodesic};

/// Limits of the chain search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    /// Arc length added beyond both points when sampling `Q`.
    pub extension: f64,
    pub step: f64,
    /// Largest scaling factor for chains on full sweeps.
    pub n_max: u64,
    /// Offsets on each side of the midpoint for two-segment chains.
    pub grid: usize,
    /// How often a segment may be halved when a pole separates its ends.
    pub split_depth: u32,
    /// Funk normalisation `k`.
    pub k: f64,
    pub shoot_tol: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            extension: 8.0,
            step: 5e-3,
            n_max: 10_000,
            grid: 0,
            split_depth: 2,
            k: 1.0,
            shoot_tol: 1e-9,
        }
    }
}

impl SearchBudget {
    pub fn doubled(&self) -> Self {
        Self {
            extension: 2.0 * self.extension,
            step: 0.5 * self.step,
            n_max: 2 * self.n_max,
            grid: 2 * self.grid,
            split_depth: self.split_depth + 1,
            ..*self
        }
    }

    pub fn halved(&self) -> Self {
        Self {
            extension: 0.5 * self.extension,
            step: 2.0 * self.step,
            n_max: (self.n_max / 2).max(1),
            grid: self.grid / 2,
            split_depth: self.split_depth.saturating_sub(1),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyBound {
    pub family: String,
    pub bound: Option<f64>,
}

/// Upper bound for `d_M(from, to)` with the chain attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct PseudoDistanceEstimate {
    #[serde(rename = "x")]
    pub from: Vec<f64>,
    #[serde(rename = "y")]
    pub to: Vec<f64>,
    pub upper_bound: f64,
    pub chain: Chain,
    pub families: Vec<FamilyBound>,
    #[serde(rename = "budget_used")]
    pub budget: SearchBudget,
    /// Length of the connecting geodesic.
    pub geodesic_length: f64,
}

/// Sampled geodesic through both points with its sweep data.
struct Sweep {
    path: GeodesicPath,
    q: SampledQ,
    reports: (OscillationReport, OscillationReport),
    s_star: f64,
}

fn sweep<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64], budget: &SearchBudget) -> Result<Sweep> {
    let ShotGeodesic { direction, s_star, .. } = shoot_geodesic(m, x, y, budget.extension, budget.step, budget.shoot_tol)?;
    // long extensions can run off the chart numerically; shorten them
    let mut ext = budget.extension;
    let path = loop {
        match integrate_geodesic_through(m, x, &direction, ext, s_star + ext, budget.step) {
            Ok(p) => break p,
            Err(FinslerError::StepTooLarge { .. } | FinslerError::DomainError { .. }) if ext > 0.5 => ext *= 0.5,
            Err(e) => return Err(e),
        }
    };
    let path = q_along(m, path)?;
    let q = SampledQ::from_path(&path)?;
    let reports = path_oscillation(&path)?;
    Ok(Sweep { path, q, reports, s_star })
}

impl Sweep {
    /// Cover of `pp`; ends at the chart boundary never count as infinite.
    fn cover(&self, pp: &ProjectiveParameter) -> Result<IntervalCover> {
        path_cover(&self.path, pp, (&self.reports.0, &self.reports.1))
    }

    fn parameters(&self, s0: f64, s1: f64) -> Vec<ProjectiveParameter> {
        let anchor = nearest_node(&self.q.s, 0.5 * (s0 + s1));
        let mut out: Vec<ProjectiveParameter> = ProjectiveParameter::canonical_at(&self.q, anchor).into_iter().collect();
        out.extend(adapted_parameter(&self.q, self.reports.0.verdict, self.reports.1.verdict));
        out
    }

    /// Shortest single-piece chain from `x(s0)` to `x(s1)`, halving the
    /// stretch when no pole-free piece holds both ends.
    fn best_chain(&self, s0: f64, s1: f64, depth: u32, budget: &SearchBudget) -> Option<(f64, Chain)> {
        let mut best: Option<(f64, Chain)> = None;
        for pp in self.parameters(s0, s1) {
            let Ok(cover) = self.cover(&pp) else { continue };
            let Some(iv) = common_piece(&cover, s0, s1) else { continue };
            let piece = SweepPiece { path: &self.path, pp: &pp, iv };
            let seg = if iv.full_sweep {
                piece.scaling(s0, s1, budget.n_max).ok()
            } else {
                piece.hilbert(s0, s1).ok().flatten()
            };
            let Some(seg) = seg else { continue };
            let chain = Chain::single(self.path.position_at(s0), self.path.position_at(s1), seg);
            if let Ok(len) = chain_length(&chain, budget.k) {
                if best.as_ref().map_or(true, |b| len < b.0) {
                    best = Some((len, chain));
                }
            }
        }
        if best.is_none() && depth > 0 {
            let mid = 0.5 * (s0 + s1);
            let (l0, c0) = self.best_chain(s0, mid, depth - 1, budget)?;
            let (l1, c1) = self.best_chain(mid, s1, depth - 1, budget)?;
            best = Some((l0 + l1, c0.join(c1)));
        }
        best
    }
}

fn single_geodesic<M: FinslerMetric>(m: &M, x: &[f64], y: &[f64], budget: &SearchBudget) -> Result<(f64, Chain, f64)> {
    let sw = sweep(m, x, y, budget)?;
    let (len, mut chain) = sw
        .best_chain(0.0, sw.s_star, budget.split_depth, budget)
        .ok_or_else(|| FinslerError::NoGeodesicFound("no admissible chain along the connecting geodesic".into()))?;
    // the chain runs between the sampled positions; report the requested points
    chain.points[0] = x.to_vec();
    let last = chain.points.len() - 1;
    chain.points[last] = y.to_vec();
    let len = chain_length(&chain, budget.k).unwrap_or(len);
    Ok((len, chain, sw.s_star))
}

/// Midpoint offsets perpendicular to the chord, `j * |y - x| / 4` for
/// `j = ±1, .., ±grid`.
fn midpoint_grid(x: &[f64], y: &[f64], grid: usize) -> Vec<Vec<f64>> {
    let c: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let len = norm(&c);
    let mut n = vec![0.0; x.len()];
    if x.len() >= 2 {
        n[0] = -c[1] / len;
        n[1] = c[0] / len;
    }
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    (1..=grid as i64)
        .flat_map(|j| [j, -j])
        .map(|j| {
            let t = j as f64 * 0.25 * len;
            mid.iter().zip(&n).map(|(m, v)| m + t * v).collect()
        })
        .collect()
}

/// Upper bound for the projective pseudo-distance from `x` to `y`.
///
/// Families searched: single chains along the connecting geodesic (scaling
/// chains on full sweeps, otherwise the best centred map onto a bounded
/// sweep, with halving across poles), and two-piece chains through
/// perpendicular offsets of the midpoint. The smallest admissible length wins.
pub fn estimate_pseudo_distance<M: FinslerMetric>(
    m: &M,
    x: &[f64],
    y: &[f64],
    budget: &SearchBudget,
) -> Result<PseudoDistanceEstimate> {
    for p in [x, y] {
        if !m.contains(p) {
            return Err(FinslerError::DomainError { point: p.to_vec() });
        }
    }
    if x == y {
        return Ok(PseudoDistanceEstimate {
            from: x.to_vec(),
            to: y.to_vec(),
            upper_bound: 0.0,
            chain: Chain {
                points: vec![x.to_vec()],
                segments: Vec::new(),
            },
            families: Vec::new(),
            budget: *budget,
            geodesic_length: 0.0,
        });
    }
    let (direct, chain, s_star) = single_geodesic(m, x, y, budget)?;
    let mut families = vec![FamilyBound {
        family: "single-geodesic".into(),
        bound: Some(direct),
    }];
    let mut best = (direct, chain);

    if budget.grid > 0 {
        let two: Vec<Option<(f64, Chain)>> = midpoint_grid(x, y, budget.grid)
            .par_iter()
            .map(|z| {
                if !m.contains(z) {
                    return None;
                }
                let (l0, c0, _) = single_geodesic(m, x, z, budget).ok()?;
                let (l1, c1, _) = single_geodesic(m, z, y, budget).ok()?;
                Some((l0 + l1, c0.join(c1)))
            })
            .collect();
        let found = two.into_iter().flatten().min_by(|a, b| a.0.total_cmp(&b.0));
        families.push(FamilyBound {
            family: "two-segment-midpoint".into(),
            bound: found.as_ref().map(|f| f.0),
        });
        if let Some(f) = found {
            if f.0 < best.0 {
                best = f;
            }
        }
    }
    Ok(PseudoDistanceEstimate {
        from: x.to_vec(),
        to: y.to_vec(),
        upper_bound: best.0,
        chain: best.1,
        families,
        budget: *budget,
        geodesic_length: s_star,
    })
}
