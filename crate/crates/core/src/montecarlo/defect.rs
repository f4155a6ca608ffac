use crate::numeric::pairwise_sum;

use super::FieldSample;

/// `sign(t)` with `sign(0) = 0`.
pub fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `Σ_i w_i sign(T(x_i))`, accumulated over antipodal pairs so that an
/// odd field cancels exactly.
pub fn defect_estimate(sample: &FieldSample) -> f64 {
    defect_from_values(&sample.grid, &sample.values)
}

pub(crate) fn defect_from_values(grid: &crate::spherequad::QuadratureGrid, values: &[f64]) -> f64 {
    let w = grid.weights();
    let terms: Vec<f64> = grid
        .antipode()
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < j)
        .map(|(i, &j)| w[i] * sign(values[i]) + w[j] * sign(values[j]))
        .collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::montecarlo::{FieldSampler, SamplerMethod};
    use crate::specfun::sphere_surface;
    use crate::spherequad::build_grid;

    #[test]
    fn constant_fields() {
        for d in 2..=3 {
            let grid = Arc::new(build_grid(d, 9).unwrap());
            let n = grid.len();
            let pos = FieldSample::from_values(Arc::clone(&grid), 2, vec![1.0; n]).unwrap();
            assert!((defect_estimate(&pos) - sphere_surface(d)).abs() < 1e-12);
            let zero = FieldSample::from_values(Arc::clone(&grid), 2, vec![0.0; n]).unwrap();
            assert_eq!(defect_estimate(&zero), 0.0);
            assert!(FieldSample::from_values(grid, 2, vec![1.0; n + 1]).is_err());
        }
        assert_eq!(sign(-0.0), 0.0);
    }

    #[test]
    fn bounded_and_odd_zero() {
        let grid = Arc::new(build_grid(2, 47).unwrap());
        let area = sphere_surface(2);
        for l in [6, 7] {
            let s =
                FieldSampler::new(l, Arc::clone(&grid), SamplerMethod::SpectralBasis, 3).unwrap();
            for r in 0..50 {
                let dft = defect_estimate(&s.sample(r));
                assert!(dft.abs() <= area * (1.0 + 1e-12));
                if l % 2 == 1 {
                    assert_eq!(dft, 0.0);
                }
            }
        }
    }
}
