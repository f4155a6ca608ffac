//! Simulation of the random eigenfunction `T_ℓ` on `S^d`, quadrature
//! estimates of its defect and empirical CLT diagnostics.

mod clt;
mod defect;
mod sampler;
mod stats;

pub use clt::{
    clt_experiment, default_resolution, defect_realizations, min_resolution, CltConfig,
    CltDiagnostics, CltResult,
};
pub use defect::{defect_estimate, sign};
pub use sampler::{
    sample_field, FieldSample, FieldSampler, SamplerMethod, FACTORIZATION_BUDGET, JITTER_SCHEDULE,
};
pub use stats::{ks_statistic, mean_and_variance, wasserstein1_empirical, wasserstein1_two_sample};
