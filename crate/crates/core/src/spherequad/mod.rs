//! Exact-degree quadrature on `[-1, 1]` and on the sphere `S^d`.

mod grid;
mod interval;
mod moments;

pub use grid::{
    build_grid, build_grid_with_budget, geodesic, QuadratureGrid, DEFAULT_POINT_BUDGET,
};
pub use interval::{
    clenshaw_curtis, gauss_chebyshev, gauss_legendre, legendre_exact, weighted_rule, IntervalRule,
    MAX_RULE_DEGREE,
};
pub use moments::{cubic_integral, gegenbauer_moment, moment_table, MomentRange};
