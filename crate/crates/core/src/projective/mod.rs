//! Projective parameters of geodesics: solutions of `y'' + Q y = 0`,
//! ratios `p = y1 / y2`, Schwarzian derivatives and Möbius maps.
//!
//! The canonical pair `y2 = (1, 0)`, `y1 = (0, 1)` has Wronskian 1, so
//! `p' = 1 / y2^2` and `{p, s} = 2 Q`. Closed forms are keyed by the target
//! Schwarzian value `sigma = 2 Q`, which fixes the basis frequency at
//! `sqrt(|sigma| / 2)`.

mod mobius;
mod ode;
mod param;
mod schwarzian;

pub use mobius::{closed_form_parameter, fit_mobius, ClosedFormParameter, MobiusMap};
pub use ode::{
    nearest_node, solve_linear_ode, solve_linear_ode_at, uniform_grid, wronskian, LinearOdeSolution, SampledQ,
};
pub use param::{mobius_apply, projective_parameter, projective_parameter_at, ProjectiveParameter};
pub use schwarzian::{
    schwarzian, schwarzian_direct, schwarzian_from_derivatives, schwarzian_sampled, stencil_derivatives, CRITICAL_DP, STENCIL_STEP,
};
