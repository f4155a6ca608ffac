//! Wiener-chaos expansion of the defect: chaos weights, the exact variance
//! series, the coefficients `c_{2q+1;d}`, the limiting constant `C_d` and
//! the combinatorial inequalities used for `L²` convergence.

mod constant;
mod facile;
mod oscillatory;
mod variance;
mod weights;

pub use constant::{
    c3_closed_form, c_coefficient, constant_estimate, constant_lower_bound, CCoefficient,
    ConstantEstimate, ConstantMethod,
};
pub use facile::{facile_check, FacileReport, InequalityCheck};
pub use oscillatory::{integrate_lobes, LobeIntegral, LobeOptions};
pub use variance::{
    exact_variance, exact_variance_with, variance_arcsin_integral, variance_partial,
    VarianceOptions, VarianceReport,
};
pub use weights::{
    chaos_weight, indicator_l2_sums, j_coefficient, weight_tail, weight_tail_bound,
    ChaosCoefficients, IndicatorL2, MAX_WEIGHT_ORDER,
};
