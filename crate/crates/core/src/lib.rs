//! Defect statistics of random hyperspherical harmonics.
//!
//! The defect of a Gaussian Laplace eigenfunction `T_ℓ` on the unit sphere
//! `S^d` is the measure of the region where the field is positive minus the
//! measure of the region where it is negative. This crate computes its
//! variance exactly through the Wiener-chaos series, the limiting constant
//! `C_d` by two independent routes, the Gaunt-coefficient identities behind
//! the fourth-cumulant reduction of the bispectrum, and Monte Carlo
//! diagnostics for the central limit behaviour.
//!
//! Module map:
//!
//! * [`specfun`]: normalized Gegenbauer polynomials, Hermite polynomials,
//!   the scaled Bessel kernel, sphere surfaces, eigenspace dimensions.
//! * [`spherequad`]: exact-degree quadrature on `[-1, 1]` and on `S^d`.
//! * [`harmonics`]: real hyperspherical harmonic bases, Gaunt tables,
//!   circulant-diagram sums.
//! * [`chaos`]: chaos weights, exact variance, `c_{2q+1;d}` and `C_d`.
//! * [`montecarlo`]: seeded field simulation and CLT diagnostics.
//! * [`acceptance`]: the end-to-end acceptance checks shared by the test
//!   suite and the command line `selftest`.

pub mod acceptance;
pub mod chaos;
mod error;
pub mod harmonics;
pub mod montecarlo;
pub mod numeric;
pub mod specfun;
pub mod spherequad;

pub use error::{Error, Result};
