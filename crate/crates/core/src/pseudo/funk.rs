use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};

/// Funk metric and distance on `I = (-1, 1)` with normalisation `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunkInterval {
    pub k: f64,
}

impl Default for FunkInterval {
    fn default() -> Self {
        Self { k: 1.0 }
    }
}

fn check_inside(u: f64) -> Result<()> {
    if u.abs() < 1.0 {
        Ok(())
    } else {
        Err(FinslerError::DomainError { point: vec![u] })
    }
}

impl FunkInterval {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(FinslerError::InvalidDescriptor(format!("Funk constant k must be positive, got {k}")));
        }
        Ok(Self { k })
    }

    /// `L_f(u, y) = (|y| + u y) / (k (1 - u^2))`.
    pub fn metric(&self, u: f64, y: f64) -> Result<f64> {
        check_inside(u)?;
        Ok((y.abs() + u * y) / (self.k * (1.0 - u * u)))
    }

    /// `D_f(a, b) = (|ln((1-a)(1+b) / ((1-b)(1+a)))| + ln((1-a^2) / (1-b^2))) / 2k`.
    pub fn distance(&self, a: f64, b: f64) -> Result<f64> {
        check_inside(a)?;
        check_inside(b)?;
        if a == b {
            return Ok(0.0);
        }
        let cross = (1.0 - a).ln() + (1.0 + b).ln() - (1.0 - b).ln() - (1.0 + a).ln();
        let tilt = (1.0 - a).ln() + (1.0 + a).ln() - (1.0 - b).ln() - (1.0 + b).ln();
        Ok(((cross.abs() + tilt) / (2.0 * self.k)).max(0.0))
    }
}

pub fn funk_metric_1d(u: f64, y: f64, k: f64) -> Result<f64> {
    FunkInterval::new(k)?.metric(u, y)
}

pub fn funk_distance(a: f64, b: f64, k: f64) -> Result<f64> {
    FunkInterval::new(k)?.distance(a, b)
}

/// `D_f(-1/2n, 1/2n) = ln((2n + 1) / (2n - 1)) / k`.
pub fn lemma2_length(n: u64, k: f64) -> f64 {
    let n = n as f64;
    ((2.0 * n + 1.0) / (2.0 * n - 1.0)).ln() / k
}
