//! Deterministic numerical kernels: adaptive quadrature for complex
//! integrands, fixed Gauss–Legendre panels, the upper incomplete gamma
//! function for arbitrary real order and monotone inversion on [0, 1].

mod gamma;
mod gauss;
mod inverse;
mod quad;

pub use gamma::{gamma, incomplete_gamma_upper, EULER_GAMMA};
pub use gauss::{gauss_legendre, GaussRule, GL8};
pub use inverse::monotone_inverse;
pub use quad::{adaptive_quad, adaptive_quad_with, try_quad, QuadOptions, QuadResult};

/// Default absolute tolerance used by every quadrature unless overridden.
pub const DEFAULT_TOL: f64 = 1e-10;
