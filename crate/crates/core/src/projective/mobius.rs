use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};

use super::schwarzian::schwarzian_from_derivatives;

const DET_TOL: f64 = 1e-12;

/// `t -> (a t + b) / (c t + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if !(det.abs() > DET_TOL * scale * scale) {
            return Err(FinslerError::DegenerateCoefficients { det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `self ∘ other`, the matrix product.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.a * t + self.b) / (self.c * t + self.d)
    }

    /// Entries uniform in `[-2, 2]`, redrawn until `|det| >= 0.1`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        loop {
            let mut e = || rng.gen_range(-2.0..2.0);
            let m = Self { a: e(), b: e(), c: e(), d: e() };
            if m.det().abs() >= 0.1 {
                return m;
            }
        }
    }
}

/// Least-squares Möbius map taking `p` to `target`: the right singular
/// vector of the smallest singular value of rows `[p, 1, -t p, -t]`.
pub fn fit_mobius(p: &[f64], target: &[f64]) -> Result<MobiusMap> {
    if p.len() != target.len() || p.len() < 4 {
        return Err(FinslerError::GridMismatch(format!(
            "{} samples against {} targets",
            p.len(),
            target.len()
        )));
    }
    let rows = p.len();
    let mut a = DMatrix::zeros(rows, 4);
    for (i, (&x, &t)) in p.iter().zip(target).enumerate() {
        let w = 1.0 / (1.0 + x * x + t * t + (x * t) * (x * t)).sqrt();
        a[(i, 0)] = w * x;
        a[(i, 1)] = w;
        a[(i, 2)] = -w * t * x;
        a[(i, 3)] = -w * t;
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| FinslerError::GridMismatch("SVD failed".into()))?;
    let k = svd.singular_values.imin();
    let v = v_t.row(k);
    MobiusMap::new(v[0], v[1], v[2], v[3])
}

/// Closed-form projective parameter with constant Schwarzian `sigma`:
/// `p = (alpha u1 + beta u2) / (gamma u1 + delta u2)` over the basis
/// `(cos ws, sin ws)`, `(e^{ws}, e^{-ws})` or `(1, s)`, with `w = sqrt(|sigma| / 2)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedFormParameter {
    pub sigma: f64,
    pub coeffs: (f64, f64, f64, f64),
    pub omega: f64,
}

impl ClosedFormParameter {
    pub fn new(sigma: f64, coeffs: (f64, f64, f64, f64)) -> Result<Self> {
        let (al, be, ga, de) = coeffs;
        MobiusMap::new(al, be, ga, de)?;
        Ok(Self {
            sigma,
            coeffs,
            omega: (sigma.abs() / 2.0).sqrt(),
        })
    }

    /// `(u1, u2, u1', u2')` at `s`.
    pub fn basis(&self, s: f64) -> (f64, f64, f64, f64) {
        let w = self.omega;
        if self.sigma > 0.0 {
            let (sn, cs) = (w * s).sin_cos();
            (cs, sn, -w * sn, w * cs)
        } else if self.sigma < 0.0 {
            let (ep, em) = ((w * s).exp(), (-w * s).exp());
            (ep, em, w * ep, -w * em)
        } else {
            (1.0, s, 0.0, 1.0)
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let (al, be, ga, de) = self.coeffs;
        let (u1, u2, _, _) = self.basis(s);
        (al * u1 + be * u2) / (ga * u1 + de * u2)
    }

    /// Exact `(p', p'', p''')`.
    pub fn derivatives(&self, s: f64) -> (f64, f64, f64) {
        let (al, be, ga, de) = self.coeffs;
        let (u1, u2, u1p, u2p) = self.basis(s);
        let det = al * de - be * ga;
        let wb = u1p * u2 - u1 * u2p;
        let d0 = ga * u1 + de * u2;
        let d1 = ga * u1p + de * u2p;
        let d2 = -0.5 * self.sigma * d0;
        let k = det * wb;
        (
            k / (d0 * d0),
            -2.0 * k * d1 / d0.powi(3),
            -2.0 * k * (d2 * d0 - 3.0 * d1 * d1) / d0.powi(4),
        )
    }

    pub fn schwarzian(&self, s: f64) -> Result<f64> {
        let (d1, d2, d3) = self.derivatives(s);
        schwarzian_from_derivatives(d1, d2, d3)
    }
}

/// Closed form keyed by the target Schwarzian; see [`ClosedFormParameter`].
pub fn closed_form_parameter(sigma: f64, coeffs: (f64, f64, f64, f64)) -> Result<ClosedFormParameter> {
    ClosedFormParameter::new(sigma, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::schwarzian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_coefficients() {
        assert!(matches!(
            MobiusMap::new(1.0, 2.0, 2.0, 4.0),
            Err(FinslerError::DegenerateCoefficients { .. })
        ));
        assert!(closed_form_parameter(1.0, (1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn composition_is_matrix_product() {
        let f = MobiusMap::new(1.0, 2.0, 0.5, 3.0).unwrap();
        let g = MobiusMap::new(-1.0, 0.3, 2.0, 1.0).unwrap();
        let t = 0.37;
        assert!((f.compose(&g).apply(t) - f.apply(g.apply(t))).abs() < 1e-14);
        assert!((f.compose(&g).det() - f.det() * g.det()).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_known_functions() {
        let id = closed_form_parameter(0.0, (0.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((id.eval(0.7) - 0.7).abs() < 1e-15);
        assert_eq!(id.schwarzian(0.7).unwrap(), 0.0);

        let tan = closed_form_parameter(2.0, (0.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((tan.eval(0.3) - 0.3f64.tan()).abs() < 1e-15);
        assert!((schwarzian(|s| tan.eval(s), 0.3).unwrap() - 2.0).abs() <= 1e-6);
        assert!((tan.schwarzian(0.3).unwrap() - 2.0).abs() < 1e-12);

        let tanh = closed_form_parameter(-2.0, (1.0, -1.0, 1.0, 1.0)).unwrap();
        assert!((tanh.eval(0.7) - 0.7f64.tanh()).abs() < 1e-15);
        assert!((schwarzian(|s| tanh.eval(s), 0.7).unwrap() + 2.0).abs() <= 1e-6);
        assert!((tanh.schwarzian(0.7).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_derivatives_agree_with_stencils() {
        let p = closed_form_parameter(0.8, (0.3, -1.2, 0.7, 0.4)).unwrap();
        let h = 1e-3;
        let f: [f64; 7] = std::array::from_fn(|k| p.eval(0.2 + (k as f64 - 3.0) * h));
        let num = super::super::schwarzian::stencil_derivatives(&f, h);
        let ana = p.derivatives(0.2);
        assert!((num.0 - ana.0).abs() < 1e-8 * ana.0.abs().max(1.0));
        assert!((num.1 - ana.1).abs() < 1e-6 * ana.1.abs().max(1.0));
        assert!((num.2 - ana.2).abs() < 1e-4 * ana.2.abs().max(1.0));
    }

    #[test]
    fn fit_recovers_a_known_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mu = MobiusMap::random(&mut rng);
        let p: Vec<f64> = (0..200).map(|k| -1.0 + k as f64 * 0.01).filter(|t| (mu.c * t + mu.d).abs() > 0.05).collect();
        let t: Vec<f64> = p.iter().map(|&x| mu.apply(x)).collect();
        let fit = fit_mobius(&p, &t).unwrap();
        let err = p.iter().zip(&t).map(|(&x, &y)| (fit.apply(x) - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }
}
