use rayon::prelude::*;
use serde::Serialize;

use crate::metric::FinslerMetric;

use super::estimate::{estimate_pseudo_distance, SearchBudget};

/// Slack floor added to every refinement difference.
pub const SLACK_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct TriangleCheck {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `est(x_i, x_k)`
    pub direct: f64,
    /// `est(x_i, x_j) + est(x_j, x_k)`
    pub via: f64,
    pub slack: f64,
    pub holds: bool,
    /// Holds only with the slack.
    pub loose: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomsReport {
    pub points: Vec<Vec<f64>>,
    /// Directed upper bounds `est(x_i, x_j)`; `None` where shooting failed.
    pub estimates: Vec<Vec<Option<f64>>>,
    /// `|est(budget) - est(halved budget)| + SLACK_FLOOR`.
    pub slack: Vec<Vec<f64>>,
    pub zero_diagonal: bool,
    pub triangles: Vec<TriangleCheck>,
    /// Largest `|est(x_i, x_j) - est(x_j, x_i)|`.
    pub asymmetry: f64,
}

impl AxiomsReport {
    pub fn all_hold(&self) -> bool {
        self.zero_diagonal && self.triangles.iter().all(|t| t.holds)
    }
}

/// Directed estimates for every ordered pair of `points`, checked for
/// `d(x, x) = 0` and the triangle inequality up to twice the search slack.
pub fn pseudo_distance_axioms_report<M: FinslerMetric>(m: &M, points: &[Vec<f64>], budget: &SearchBudget) -> AxiomsReport {
    let n = points.len();
    let coarse = budget.halved();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let results: Vec<(Option<f64>, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let fine = estimate_pseudo_distance(m, &points[i], &points[j], budget).ok().map(|e| e.upper_bound);
            let rough = estimate_pseudo_distance(m, &points[i], &points[j], &coarse).ok().map(|e| e.upper_bound);
            let slack = match (fine, rough) {
                (Some(a), Some(b)) => (a - b).abs() + SLACK_FLOOR,
                _ => f64::INFINITY,
            };
            (fine, slack)
        })
        .collect();
    let mut estimates = vec![vec![None; n]; n];
    let mut slack = vec![vec![0.0; n]; n];
    for (&(i, j), (e, s)) in pairs.iter().zip(results) {
        estimates[i][j] = e;
        slack[i][j] = s;
    }
    let zero_diagonal = (0..n).all(|i| estimates[i][i] == Some(0.0));
    let mut triangles = Vec::new();
    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if let (Some(a), Some(b)) = (estimates[i][j], estimates[j][i]) {
                asymmetry = asymmetry.max((a - b).abs());
            }
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let (Some(d), Some(a), Some(b)) = (estimates[i][k], estimates[i][j], estimates[j][k]) else {
                    continue;
                };
                let s = 2.0 * slack[i][k].max(slack[i][j]).max(slack[j][k]);
                let holds = d <= a + b + s;
                triangles.push(TriangleCheck {
                    i,
                    j,
                    k,
                    direct: d,
                    via: a + b,
                    slack: s,
                    holds,
                    loose: holds && d > a + b,
                });
            }
        }
    }
    AxiomsReport {
        points: points.to_vec(),
        estimates,
        slack,
        zero_diagonal,
        triangles,
        asymmetry,
    }
}
