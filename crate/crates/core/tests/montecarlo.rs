//! Statistical invariants of the Monte Carlo module.

use std::sync::Arc;

use hyperdefect::montecarlo::{
    clt_experiment, default_resolution, defect_estimate, min_resolution, CltConfig, FieldSampler,
    SamplerMethod,
};
use hyperdefect::specfun::sphere_surface;
use hyperdefect::spherequad::build_grid;

#[test]
fn grid_refinement_changes_variance_by_less_than_one_se() {
    let l = 20;
    let base = CltConfig {
        seed: 314,
        ..CltConfig::default()
    };
    let fine = CltConfig {
        resolution: Some(2 * default_resolution(l)),
        ..base.clone()
    };
    let a = clt_experiment(2, l, 1000, &base).unwrap().diagnostics;
    let b = clt_experiment(2, l, 1000, &fine).unwrap().diagnostics;
    assert!(
        (a.variance - b.variance).abs() < a.variance_se,
        "{} vs {} (SE {})",
        a.variance,
        b.variance,
        a.variance_se
    );
}

#[test]
fn samplers_agree_on_defect_variance() {
    let l = 8;
    let spectral = CltConfig {
        seed: 1,
        resolution: Some(min_resolution(l)),
        ..CltConfig::default()
    };
    let covariance = CltConfig {
        seed: 2,
        method: SamplerMethod::CovarianceFactorization,
        ..spectral.clone()
    };
    let a = clt_experiment(2, l, 2000, &spectral).unwrap().diagnostics;
    let b = clt_experiment(2, l, 2000, &covariance).unwrap().diagnostics;
    let se = a.variance_se.hypot(b.variance_se);
    assert!(
        (a.variance - b.variance).abs() < 3.0 * se,
        "{} vs {} (SE {se})",
        a.variance,
        b.variance
    );
}

#[test]
fn defects_bounded_by_area() {
    for d in [2u32, 3] {
        let l = 4;
        let grid = Arc::new(build_grid(d, u64::from(min_resolution(l)) - 1).unwrap());
        let s = FieldSampler::new(l, grid, SamplerMethod::SpectralBasis, 8).unwrap();
        for r in 0..100 {
            assert!(defect_estimate(&s.sample(r)).abs() <= sphere_surface(d) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn seeded_runs_are_bit_identical() {
    let cfg = CltConfig {
        seed: 77,
        workers: Some(2),
        ..CltConfig::default()
    };
    let a = clt_experiment(2, 10, 100, &cfg).unwrap();
    let b = clt_experiment(2, 10, 100, &cfg).unwrap();
    assert_eq!(a.defects, b.defects);
    assert_eq!(a.diagnostics.w1.to_bits(), b.diagnostics.w1.to_bits());
}
