use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sampler::{FieldSampler, SamplerMethod};
use super::stats::{ks_statistic, mean_and_variance, wasserstein1_empirical};
use crate::chaos::exact_variance;
use crate::spherequad::build_grid;
use crate::{error::domain, Error, Result};

/// Fewest grid nodes per great-circle direction accepted for degree `ℓ`.
pub fn min_resolution(l: u32) -> u32 {
    4 * l + 20
}

/// Resolution used when none is configured. The sign functional needs a
/// finer grid than the field itself: at the minimum resolution the
/// discretization noise inflates `Var(D_ℓ)` by tens of percent, at this
/// one by about one percent.
pub fn default_resolution(l: u32) -> u32 {
    20 * l + 20
}

/// Settings of a Monte Carlo run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltConfig {
    pub seed: u64,
    /// nodes per great-circle direction; defaults to [`default_resolution`]
    pub resolution: Option<u32>,
    pub method: SamplerMethod,
    /// thread count; `None` uses the global pool
    pub workers: Option<usize>,
    /// relative tolerance of the exact variance used for normalization
    pub variance_tol: f64,
}

impl Default for CltConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            resolution: None,
            method: SamplerMethod::SpectralBasis,
            workers: None,
            variance_tol: 1e-4,
        }
    }
}

/// Summary statistics of normalized defects `D_ℓ / √Var(D_ℓ)`.
#[derive(Debug, Clone, Serialize)]
pub struct CltDiagnostics {
    pub d: u32,
    pub l: u32,
    pub realizations: usize,
    pub seed: u64,
    pub method: SamplerMethod,
    pub resolution: u32,
    pub grid_points: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub exact_variance: f64,
    pub exact_variance_tail: f64,
    pub w1: f64,
    pub ks: f64,
}

/// Raw defects together with their diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct CltResult {
    pub diagnostics: CltDiagnostics,
    pub defects: Vec<f64>,
}

impl CltResult {
    /// CSV with columns `realization,defect,normalized_defect`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "realization,defect,normalized_defect")?;
        let sd = self.diagnostics.exact_variance.sqrt();
        for (i, dft) in self.defects.iter().enumerate() {
            writeln!(out, "{i},{dft:.16e},{:.16e}", dft / sd)?;
        }
        Ok(())
    }
}

/// `n` independent quadrature defects of `T_ℓ`, realization `i` drawn
/// from stream `i` of the seed. Valid for any `ℓ >= 1`.
pub fn defect_realizations(d: u32, l: u32, n: usize, config: &CltConfig) -> Result<Vec<f64>> {
    let (sampler, _) = build_sampler(d, l, config)?;
    run_parallel(config.workers, || sampler.defects(n as u64))
}

/// Defect CLT experiment for even `ℓ`: `n` realizations normalized by the
/// exact variance, with moment, Wasserstein and Kolmogorov diagnostics.
pub fn clt_experiment(d: u32, l: u32, n: usize, config: &CltConfig) -> Result<CltResult> {
    if l == 0 || l % 2 == 1 {
        return domain(format!("CLT experiment needs even ℓ >= 2, got {l}"));
    }
    if n < 2 {
        return domain("CLT experiment needs at least two realizations");
    }
    let (sampler, resolution) = build_sampler(d, l, config)?;
    let defects = run_parallel(config.workers, || sampler.defects(n as u64))?;
    let exact = exact_variance(d, l, config.variance_tol)?;
    let sd = exact.value.sqrt();
    let z: Vec<f64> = defects.iter().map(|x| x / sd).collect();
    let (mean, variance) = mean_and_variance(&z);
    let nf = n as f64;
    let m4 = z.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    let diagnostics = CltDiagnostics {
        d,
        l,
        realizations: n,
        seed: config.seed,
        method: config.method,
        resolution,
        grid_points: sampler.grid().len(),
        mean,
        mean_se: (variance / nf).sqrt(),
        variance,
        variance_se: ((m4 - variance * variance).max(0.0) / nf).sqrt(),
        exact_variance: exact.value,
        exact_variance_tail: exact.tail_bound,
        w1: wasserstein1_empirical(&z),
        ks: ks_statistic(&z),
    };
    Ok(CltResult {
        diagnostics,
        defects,
    })
}

fn build_sampler(d: u32, l: u32, config: &CltConfig) -> Result<(FieldSampler, u32)> {
    if l == 0 {
        return domain("degree ℓ must be >= 1");
    }
    let resolution = config.resolution.unwrap_or_else(|| default_resolution(l));
    if resolution < min_resolution(l) {
        return domain(format!(
            "grid resolution {resolution} under-resolves ℓ = {l}; need at least {}",
            min_resolution(l)
        ));
    }
    let grid = Arc::new(build_grid(d, u64::from(resolution) - 1)?);
    Ok((
        FieldSampler::new(l, grid, config.method, config.seed)?,
        resolution,
    ))
}

fn run_parallel<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        let cfg = CltConfig::default();
        assert!(clt_experiment(2, 3, 10, &cfg).is_err());
        assert!(clt_experiment(2, 4, 1, &cfg).is_err());
        let coarse = CltConfig {
            resolution: Some(min_resolution(4) - 1),
            ..CltConfig::default()
        };
        assert!(clt_experiment(2, 4, 10, &coarse).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let one = CltConfig {
            seed: 99,
            workers: Some(1),
            ..CltConfig::default()
        };
        let three = CltConfig {
            workers: Some(3),
            ..one.clone()
        };
        let a = clt_experiment(2, 6, 64, &one).unwrap();
        let b = clt_experiment(2, 6, 64, &three).unwrap();
        assert_eq!(a.defects, b.defects);
        assert_eq!(
            serde_json::to_string(&a.diagnostics).unwrap(),
            serde_json::to_string(&b.diagnostics).unwrap()
        );
    }

    #[test]
    fn odd_degree_defects_vanish() {
        for d in [2, 3] {
            let defects = defect_realizations(d, 5, 40, &CltConfig::default()).unwrap();
            assert!(defects.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn csv_layout() {
        let r = clt_experiment(2, 4, 8, &CltConfig::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "realization,defect,normalized_defect");
        assert_eq!(lines.len(), 9);
        let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], 0.0);
        assert!((fields[2] * r.diagnostics.exact_variance.sqrt() - fields[1]).abs() < 1e-12);
    }
}
