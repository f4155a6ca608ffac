use rayon::prelude::*;

use super::interval::{legendre_exact, weighted_rule, IntervalRule};
use crate::numeric::pairwise_sum;
use crate::specfun::GegenbauerEvaluator;
use crate::{error::domain, Error, Result};

/// Integration range for Gegenbauer moments, in `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentRange {
    /// `θ ∈ [0, π]`
    Full,
    /// `θ ∈ [0, π/2]`
    Half,
}

// Gauss–Legendre is used for the odd-d half-range rule, which has no
// Clenshaw–Curtis fallback; keep its Newton cost bounded.
const HALF_RANGE_ODD_LIMIT: u64 = 40_000;

const CHUNK: usize = 2048;

/// `∫ G_{ℓ;d}(cos θ)^k sin^{d-1} θ dθ` over the given range.
pub fn gegenbauer_moment(d: u32, l: u32, k: u32, range: MomentRange) -> Result<f64> {
    Ok(moment_table(d, l, k, range)?[k as usize])
}

/// `∫_0^π G_{ℓ;d}(cos θ)^3 sin^{d-1} θ dθ`.
pub fn cubic_integral(d: u32, l: u32) -> Result<f64> {
    gegenbauer_moment(d, l, 3, MomentRange::Full)
}

/// Moments for every power `k = 0..=max_power` from a single rule of
/// exactness `max_power·ℓ`; entry `k` of the result is the `k`-th moment.
pub fn moment_table(d: u32, l: u32, max_power: u32, range: MomentRange) -> Result<Vec<f64>> {
    if d < 2 {
        return domain(format!("sphere dimension d = {d} must be >= 2"));
    }
    let ev = GegenbauerEvaluator::new(d, l)?;
    let degree = u64::from(max_power) * u64::from(l);
    let full = weighted_rule(d - 2, degree)?;
    let mut table = power_sums(&full, max_power, |t| ev.eval(t), |_| 1.0);
    if range == MomentRange::Full {
        return Ok(table);
    }
    for m in table.iter_mut() {
        *m /= 2.0;
    }
    if l % 2 == 0 {
        return Ok(table);
    }
    // Odd powers of an odd polynomial are not symmetric about θ = π/2.
    if max_power >= 1 {
        let odd = half_range_odd(d, &ev, max_power)?;
        for k in (1..=max_power as usize).step_by(2) {
            table[k] = odd[k];
        }
    }
    Ok(table)
}

/// `∫_0^1 g(t)^k (1-t²)^{(d-2)/2} dt` for odd `g`, all `k` at once. Only odd
/// entries are meaningful.
fn half_range_odd(d: u32, ev: &GegenbauerEvaluator, max_power: u32) -> Result<Vec<f64>> {
    let degree = u64::from(max_power) * u64::from(ev.degree());
    if d % 2 == 0 {
        let m = (d as i32 - 2) / 2;
        let base = legendre_exact(degree + 2 * m as u64)?.mapped(0.0, 1.0);
        return Ok(power_sums(
            &base,
            max_power,
            |t| ev.eval(t),
            |t| ((1.0 - t) * (1.0 + t)).powi(m),
        ));
    }
    // Odd d: with v = √(1-t²) the integral becomes ∫_0^1 (g(t)^k / t) v^{d-1} dv,
    // and g^k / t is a polynomial in v because g^k is odd in t.
    let vdeg = degree - 1 + u64::from(d - 1);
    if vdeg > HALF_RANGE_ODD_LIMIT {
        return Err(Error::Budget {
            what: "odd-dimension half-range rule degree",
            needed: u128::from(vdeg),
            limit: u128::from(HALF_RANGE_ODD_LIMIT),
        });
    }
    let n = (vdeg as usize + 1).div_ceil(2);
    let base = crate::spherequad::gauss_legendre(n)?.mapped(0.0, 1.0);
    let e = d as i32 - 1;
    let t_of = |v: f64| ((1.0 - v) * (1.0 + v)).sqrt();
    Ok(power_sums(
        &base,
        max_power,
        |v| ev.eval(t_of(v)),
        |v| v.powi(e) / t_of(v),
    ))
}

/// `Σ_i w_i h(x_i) g(x_i)^k` for all `k`, chunked for a thread-count
/// independent summation order.
fn power_sums<G, H>(rule: &IntervalRule, max_power: u32, g: G, h: H) -> Vec<f64>
where
    G: Fn(f64) -> f64 + Sync,
    H: Fn(f64) -> f64 + Sync,
{
    let kmax = max_power as usize;
    let partials: Vec<Vec<f64>> = rule
        .nodes
        .par_chunks(CHUNK)
        .zip(rule.weights.par_chunks(CHUNK))
        .map(|(xs, ws)| {
            let mut acc = vec![0.0; kmax + 1];
            for (&x, &w) in xs.iter().zip(ws) {
                let gv = g(x);
                let mut p = w * h(x);
                acc[0] += p;
                for a in acc.iter_mut().skip(1) {
                    p *= gv;
                    *a += p;
                }
            }
            acc
        })
        .collect();
    (0..=kmax)
        .map(|k| {
            let col: Vec<f64> = partials.iter().map(|p| p[k]).collect();
            pairwise_sum(&col)
        })
        .collect()
}
