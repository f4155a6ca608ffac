use std::sync::Arc;

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::defect::{defect_from_values, sign};
use crate::harmonics::build_basis;
use crate::numeric::pairwise_sum;
use crate::specfun::{sphere_surface, GegenbauerEvaluator};
use crate::spherequad::QuadratureGrid;
use crate::{error::domain, Error, Result};

/// Largest grid accepted by the covariance-factorization sampler.
pub const FACTORIZATION_BUDGET: usize = 4096;

/// Diagonal jitter tried in turn, in units of `trace(K) / size`.
pub const JITTER_SCHEDULE: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];

/// How field values are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMethod {
    /// `Σ_m a_m Y_m(x)` with i.i.d. `a_m ~ N(0, |S^d|/n)`
    SpectralBasis,
    /// `L z` with `L Lᵀ = K + εI`, `K_{ij} = G_{ℓ;d}(⟨x_i, x_j⟩)`
    CovarianceFactorization,
}

impl std::fmt::Display for SamplerMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplerMethod::SpectralBasis => "spectral-basis",
            SamplerMethod::CovarianceFactorization => "covariance-factorization",
        })
    }
}

impl std::str::FromStr for SamplerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral-basis" | "spectral" => Ok(SamplerMethod::SpectralBasis),
            "covariance-factorization" | "covariance" => Ok(SamplerMethod::CovarianceFactorization),
            other => Err(Error::Parse(format!("unknown sampler {other:?}"))),
        }
    }
}

/// One realization of `T_ℓ` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSample {
    pub d: u32,
    pub l: u32,
    pub method: SamplerMethod,
    pub seed: u64,
    pub realization: u64,
    #[serde(skip)]
    pub grid: Arc<QuadratureGrid>,
    pub values: Vec<f64>,
}

impl FieldSample {
    /// A sample with caller-supplied values, for testing functionals.
    pub fn from_values(grid: Arc<QuadratureGrid>, l: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            ));
        }
        Ok(Self {
            d: grid.d(),
            l,
            method: SamplerMethod::SpectralBasis,
            seed: 0,
            realization: 0,
            grid,
            values,
        })
    }
}

enum Factor {
    // Basis values scaled by √(|S^d|/n) at one point of each antipodal
    // pair; the partner follows from `T(-x) = (-1)^ℓ T(x)`.
    Spectral {
        half: DMatrix<f64>,
        reps: Vec<usize>,
        parity: f64,
    },
    Cholesky {
        lower: DMatrix<f64>,
        jitter: f64,
    },
}

/// Realizations synthesized together by [`FieldSampler::defects`].
const BLOCK: u64 = 32;

/// Precomputed state for drawing many realizations on one grid.
///
/// Realization `i` uses the ChaCha8 stream `i` of the master seed, so
/// results do not depend on the order or threading of the draws.
pub struct FieldSampler {
    d: u32,
    l: u32,
    method: SamplerMethod,
    seed: u64,
    grid: Arc<QuadratureGrid>,
    factor: Factor,
}

impl FieldSampler {
    pub fn new(
        l: u32,
        grid: Arc<QuadratureGrid>,
        method: SamplerMethod,
        seed: u64,
    ) -> Result<Self> {
        let d = grid.d();
        let factor = match method {
            SamplerMethod::SpectralBasis => {
                let basis = build_basis(d, l)?;
                let n = basis.len();
                let scale = (sphere_surface(d) / n as f64).sqrt();
                let reps: Vec<usize> = grid
                    .antipode()
                    .iter()
                    .enumerate()
                    .filter(|&(i, &j)| i < j)
                    .map(|(i, _)| i)
                    .collect();
                let mut half = DMatrix::zeros(reps.len(), n);
                let mut row = vec![0.0; n];
                for (k, &i) in reps.iter().enumerate() {
                    basis.eval_all(grid.point(i), &mut row);
                    for (m, v) in row.iter().enumerate() {
                        half[(k, m)] = scale * v;
                    }
                }
                let parity = if l % 2 == 0 { 1.0 } else { -1.0 };
                Factor::Spectral { half, reps, parity }
            }
            SamplerMethod::CovarianceFactorization => covariance_factor(d, l, &grid)?,
        };
        Ok(Self {
            d,
            l,
            method,
            seed,
            grid,
            factor,
        })
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    /// Jitter used by the covariance factorization, in units of `trace/size`.
    pub fn jitter(&self) -> Option<f64> {
        match self.factor {
            Factor::Cholesky { jitter, .. } => Some(jitter),
            Factor::Spectral { .. } => None,
        }
    }

    fn rng(&self, realization: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(realization);
        rng
    }

    /// Field values of realization `realization`.
    pub fn values(&self, realization: u64) -> Vec<f64> {
        let mut rng = self.rng(realization);
        match &self.factor {
            Factor::Spectral { half, reps, parity } => {
                let a = DVector::from_fn(half.ncols(), |_, _| rng.sample(StandardNormal));
                let v = half * a;
                let mut out = vec![0.0; self.grid.len()];
                let antipode = self.grid.antipode();
                for (k, &i) in reps.iter().enumerate() {
                    out[i] = v[k];
                    out[antipode[i]] = parity * v[k];
                }
                out
            }
            Factor::Cholesky { lower, .. } => {
                let z = DVector::from_fn(lower.nrows(), |_, _| rng.sample(StandardNormal));
                (lower * z).iter().copied().collect()
            }
        }
    }

    /// Quadrature defects of realizations `0..count`, evaluated in
    /// parallel over fixed blocks so the result does not depend on the
    /// thread count.
    pub fn defects(&self, count: u64) -> Vec<f64> {
        let blocks: Vec<u64> = (0..count.div_ceil(BLOCK)).collect();
        let per_block: Vec<Vec<f64>> = blocks
            .par_iter()
            .map(|&b| {
                let start = b * BLOCK;
                self.block_defects(start..(start + BLOCK).min(count))
            })
            .collect();
        per_block.concat()
    }

    fn block_defects(&self, range: Range<u64>) -> Vec<f64> {
        match &self.factor {
            Factor::Spectral { half, reps, parity } => {
                let n = half.ncols();
                let width = (range.end - range.start) as usize;
                let mut coef = DMatrix::zeros(n, width);
                for (c, r) in range.enumerate() {
                    let mut rng = self.rng(r);
                    for m in 0..n {
                        coef[(m, c)] = rng.sample(StandardNormal);
                    }
                }
                let values = half * coef;
                let antipode = self.grid.antipode();
                let w = self.grid.weights();
                (0..width)
                    .map(|c| {
                        let terms: Vec<f64> = reps
                            .iter()
                            .enumerate()
                            .map(|(k, &i)| {
                                let v = values[(k, c)];
                                w[i] * sign(v) + w[antipode[i]] * sign(parity * v)
                            })
                            .collect();
                        pairwise_sum(&terms)
                    })
                    .collect()
            }
            Factor::Cholesky { .. } => range
                .map(|r| defect_from_values(&self.grid, &self.values(r)))
                .collect(),
        }
    }

    pub fn sample(&self, realization: u64) -> FieldSample {
        FieldSample {
            d: self.d,
            l: self.l,
            method: self.method,
            seed: self.seed,
            realization,
            grid: Arc::clone(&self.grid),
            values: self.values(realization),
        }
    }
}

fn covariance_factor(d: u32, l: u32, grid: &QuadratureGrid) -> Result<Factor> {
    let p = grid.len();
    if p > FACTORIZATION_BUDGET {
        return Err(Error::Budget {
            what: "covariance factorization points",
            needed: p as u128,
            limit: FACTORIZATION_BUDGET as u128,
        });
    }
    let ev = GegenbauerEvaluator::new(d, l)?;
    let pts: Vec<&[f64]> = grid.points().collect();
    let kernel = DMatrix::from_fn(p, p, |i, j| {
        let dot: f64 = pts[i].iter().zip(pts[j]).map(|(a, b)| a * b).sum();
        ev.eval(dot.clamp(-1.0, 1.0))
    });
    let scale = kernel.trace() / p as f64;
    for &eps in &JITTER_SCHEDULE {
        let mut k = kernel.clone();
        for i in 0..p {
            k[(i, i)] += eps * scale;
        }
        if let Some(ch) = k.cholesky() {
            return Ok(Factor::Cholesky {
                lower: ch.unpack(),
                jitter: eps,
            });
        }
    }
    Err(Error::Factorization(format!(
        "covariance matrix of {p} points not factorizable with jitter up to {:e}",
        JITTER_SCHEDULE[JITTER_SCHEDULE.len() - 1]
    )))
}

/// A single realization; builds the sampler, so prefer [`FieldSampler`]
/// for repeated draws.
pub fn sample_field(
    l: u32,
    grid: Arc<QuadratureGrid>,
    method: SamplerMethod,
    seed: u64,
    realization: u64,
) -> Result<FieldSample> {
    Ok(FieldSampler::new(l, grid, method, seed)?.sample(realization))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spherequad::build_grid;

    #[test]
    fn odd_degree_is_antisymmetric() {
        let grid = Arc::new(build_grid(2, 31).unwrap());
        for l in [1, 3, 5] {
            let s =
                FieldSampler::new(l, Arc::clone(&grid), SamplerMethod::SpectralBasis, 7).unwrap();
            for r in 0..5 {
                let v = s.values(r);
                for (i, &j) in grid.antipode().iter().enumerate() {
                    assert_eq!(v[i], -v[j]);
                }
            }
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let grid = Arc::new(build_grid(2, 27).unwrap());
        let s = FieldSampler::new(4, Arc::clone(&grid), SamplerMethod::SpectralBasis, 11).unwrap();
        assert_eq!(s.values(3), s.values(3));
        assert_ne!(s.values(3), s.values(4));
        let other = FieldSampler::new(4, grid, SamplerMethod::SpectralBasis, 12).unwrap();
        assert_ne!(s.values(3), other.values(3));
    }

    #[test]
    fn pointwise_moments() {
        let grid = Arc::new(build_grid(2, 23).unwrap());
        let l = 4;
        let s =
            FieldSampler::new(l, Arc::clone(&grid), SamplerMethod::SpectralBasis, 2024).unwrap();
        let picks: Vec<usize> = (0..10).map(|k| k * grid.len() / 10 + 3).collect();
        let n = 10_000u64;
        let draws: Vec<Vec<f64>> = (0..n)
            .map(|r| {
                let v = s.values(r);
                picks.iter().map(|&i| v[i]).collect()
            })
            .collect();
        let ev = GegenbauerEvaluator::new(2, l).unwrap();
        for a in 0..picks.len() {
            // variance of each point
            let sq: Vec<f64> = draws.iter().map(|v| v[a] * v[a]).collect();
            let (m, var) = crate::montecarlo::mean_and_variance(&sq);
            let se = (var / n as f64).sqrt();
            assert!((m - 1.0).abs() < 5.0 * se, "point {a}: {m} ± {se}");
            // covariance with the next point
            let b = (a + 1) % picks.len();
            let prod: Vec<f64> = draws.iter().map(|v| v[a] * v[b]).collect();
            let (m, var) = crate::montecarlo::mean_and_variance(&prod);
            let se = (var / n as f64).sqrt();
            let (x, y) = (grid.point(picks[a]), grid.point(picks[b]));
            let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
            let expected = ev.eval(dot.clamp(-1.0, 1.0));
            assert!(
                (m - expected).abs() < 5.0 * se,
                "pair {a},{b}: {m} vs {expected} ± {se}"
            );
        }
    }

    #[test]
    fn covariance_sampler_reproduces_kernel() {
        let grid = Arc::new(build_grid(2, 15).unwrap());
        let s = FieldSampler::new(
            3,
            Arc::clone(&grid),
            SamplerMethod::CovarianceFactorization,
            5,
        )
        .unwrap();
        assert!(s.jitter().is_some());
        let n = 4000u64;
        let (i, j) = (0usize, grid.len() / 3);
        let prod: Vec<f64> = (0..n)
            .map(|r| {
                let v = s.values(r);
                v[i] * v[j]
            })
            .collect();
        let (m, var) = crate::montecarlo::mean_and_variance(&prod);
        let dot: f64 = grid
            .point(i)
            .iter()
            .zip(grid.point(j))
            .map(|(p, q)| p * q)
            .sum();
        let expected = GegenbauerEvaluator::new(2, 3).unwrap().eval(dot);
        assert!((m - expected).abs() < 5.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn block_defects_match_single_samples() {
        let grid = Arc::new(build_grid(2, 63).unwrap());
        for l in [6, 7] {
            let s =
                FieldSampler::new(l, Arc::clone(&grid), SamplerMethod::SpectralBasis, 1).unwrap();
            let blocked = s.defects(70);
            assert_eq!(blocked.len(), 70);
            for (r, d) in blocked.iter().enumerate() {
                let single = crate::montecarlo::defect_estimate(&s.sample(r as u64));
                assert!((d - single).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn method_names() {
        for m in [
            SamplerMethod::SpectralBasis,
            SamplerMethod::CovarianceFactorization,
        ] {
            assert_eq!(m.to_string().parse::<SamplerMethod>().unwrap(), m);
        }
        assert!("gibbs".parse::<SamplerMethod>().is_err());
    }

    #[test]
    fn factorization_budget() {
        let grid = Arc::new(build_grid(2, 120).unwrap());
        assert!(grid.len() > FACTORIZATION_BUDGET);
        assert!(matches!(
            FieldSampler::new(2, grid, SamplerMethod::CovarianceFactorization, 0),
            Err(Error::Budget { .. })
        ));
    }
}
