//! Special functions: normalized Gegenbauer polynomials, probabilists'
//! Hermite polynomials, the scaled Bessel kernel and sphere geometry.

mod bessel;
mod gamma;
mod gegenbauer;
mod hermite;

pub use bessel::{bessel_j, scaled_bessel, BesselOrder, ScaledBesselKernel};
pub use gamma::{eigenspace_dim, gamma_half, gamma_ratio_half, ln_gamma, sphere_surface};
pub use gegenbauer::{gegenbauer, GegenbauerEvaluator};
pub use hermite::{
    double_factorial_odd, hermite, hermite_at_zero, ln_double_factorial_odd, HermiteSequence,
    MAX_HERMITE_ORDER,
};

/// Slack allowed on `|t| <= 1` before a domain error is raised.
pub const DOMAIN_SLACK: f64 = 1e-12;
