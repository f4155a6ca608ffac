use std::f64::consts::PI;

use serde::Serialize;

use super::weights::{weight_tail_bound, ChaosCoefficients};
use crate::numeric::pairwise_sum;
use crate::specfun::{sphere_surface, GegenbauerEvaluator};
use crate::spherequad::{gauss_legendre, moment_table, MomentRange};
use crate::{error::domain, Error, Result};

/// Truncation schedule for [`exact_variance_with`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VarianceOptions {
    /// relative tolerance on the certified tail
    pub tol: f64,
    /// first truncation order tried; doubled until the tail is small enough
    pub initial_q: usize,
    /// largest truncation order tried before giving up
    pub max_q: usize,
}

impl VarianceOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            initial_q: 16,
            max_q: 4096,
        }
    }
}

/// Truncated chaos series for `Var(D_ℓ)`.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub d: u32,
    pub l: u32,
    pub q_used: usize,
    pub value: f64,
    /// certified bound on `Var(D_ℓ) - value`
    pub tail_bound: f64,
    /// `2|S^d||S^{d-1}| w_q ∫_0^{π/2} G^{2q+1} sin^{d-1}θ dθ` for `q = 1..=Q`
    pub contributions: Vec<f64>,
}

/// `Var(D_ℓ)` with relative certified tolerance `tol`.
pub fn exact_variance(d: u32, l: u32, tol: f64) -> Result<VarianceReport> {
    exact_variance_with(d, l, &VarianceOptions::with_tol(tol))
}

/// `Var(D_ℓ)` with an explicit truncation schedule.
///
/// Odd `ℓ` gives exactly zero. For even `ℓ` the order `Q` is doubled
/// until the bound on the omitted terms falls below `tol · value`.
pub fn exact_variance_with(d: u32, l: u32, opts: &VarianceOptions) -> Result<VarianceReport> {
    check_args(d, l)?;
    if !(opts.tol > 0.0) {
        return domain(format!("tolerance must be positive, got {}", opts.tol));
    }
    if l % 2 == 1 {
        return Ok(VarianceReport {
            d,
            l,
            q_used: 0,
            value: 0.0,
            tail_bound: 0.0,
            contributions: Vec::new(),
        });
    }
    let mut q = opts.initial_q.max(1);
    loop {
        let report = variance_partial(d, l, q)?;
        if report.tail_bound <= opts.tol * report.value {
            return Ok(report);
        }
        if 2 * q > opts.max_q {
            return Err(Error::ToleranceUnreachable {
                requested: opts.tol,
                achieved: report.tail_bound / report.value,
                q_used: q,
            });
        }
        q *= 2;
    }
}

/// The series truncated at exactly `Q` terms, with its certified tail.
///
/// For `q > Q` we have `|G|^{2q+1} <= G^{2Q+2}` because `|G| <= 1`, so the
/// omitted terms are at most `(Σ_{q>Q} w_q)` times the `(2Q+2)`-th moment.
pub fn variance_partial(d: u32, l: u32, q_max: usize) -> Result<VarianceReport> {
    check_args(d, l)?;
    if q_max == 0 {
        return domain("truncation order must be at least 1");
    }
    if l % 2 == 1 {
        return Ok(VarianceReport {
            d,
            l,
            q_used: q_max,
            value: 0.0,
            tail_bound: 0.0,
            contributions: vec![0.0; q_max],
        });
    }
    let pref = 2.0 * sphere_surface(d) * sphere_surface(d - 1);
    let max_power = u32::try_from(2 * q_max + 2)
        .map_err(|_| Error::Domain(format!("truncation order {q_max} too large")))?;
    let moments = moment_table(d, l, max_power, MomentRange::Half)?;
    let coeffs = ChaosCoefficients::new(q_max)?;
    let contributions: Vec<f64> = (1..=q_max)
        .map(|q| pref * coeffs.weight(q) * moments[2 * q + 1])
        .collect();
    let value = pairwise_sum(&contributions);
    let tail_bound = pref * weight_tail_bound(q_max as u64) * moments[2 * q_max + 2];
    Ok(VarianceReport {
        d,
        l,
        q_used: q_max,
        value,
        tail_bound,
        contributions,
    })
}

/// `Var(D_ℓ)` from the summed series
/// `Σ w_q G^{2q+1} = (2/π)(arcsin G - G)`, integrated in `θ` by
/// Gauss–Legendre with node doubling.
pub fn variance_arcsin_integral(d: u32, l: u32) -> Result<f64> {
    check_args(d, l)?;
    if l % 2 == 1 {
        return Ok(0.0);
    }
    let ev = GegenbauerEvaluator::new(d, l)?;
    let pref = 2.0 * sphere_surface(d) * sphere_surface(d - 1);
    let integrate = |n: usize| -> Result<f64> {
        let rule = gauss_legendre(n)?.mapped(0.0, PI / 2.0);
        Ok(rule.integrate(|theta| {
            let g = ev.eval(theta.cos()).clamp(-1.0, 1.0);
            (g.asin() - g) * theta.sin().powi(d as i32 - 1)
        }))
    };
    let mut n = 64.max(2 * l as usize);
    let mut prev = integrate(n)?;
    loop {
        n *= 2;
        let next = integrate(n)?;
        if (next - prev).abs() <= 1e-12 * next.abs() || n >= 1 << 18 {
            return Ok(pref * 2.0 / PI * next);
        }
        prev = next;
    }
}

fn check_args(d: u32, l: u32) -> Result<()> {
    if d < 2 {
        return domain(format!("sphere dimension d = {d} must be >= 2"));
    }
    if l == 0 {
        return domain("degree ℓ must be >= 1");
    }
    Ok(())
}
