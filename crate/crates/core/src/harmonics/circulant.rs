use serde::Serialize;

use super::gaunt::{g_value, GauntTable};
use crate::numeric::pairwise_sum;
use crate::specfun::{eigenspace_dim, sphere_surface};
use crate::spherequad::{gegenbauer_moment, MomentRange};
use crate::{error::domain, Error, Result};

/// Cap on `nnz²`, the number of index pairs visited by [`circulant_sum`].
pub const CIRCULANT_PAIR_BUDGET: u128 = 4_000_000_000;

/// Circulant-diagram integral `I_{ℓ;d}` by direct summation of the
/// six-index Gaunt contraction
/// `(|S^d|/n)^6 Σ 𝒢(m1,m2',m3') 𝒢(m1',m2,m3) 𝒢(m1,m2,m3) 𝒢(m1',m2',m3')`,
/// visiting only nonzero entries of the first two factors.
pub fn circulant_sum(table: &GauntTable) -> Result<f64> {
    if table.degree() % 2 == 1 {
        return Ok(0.0);
    }
    let n = table.n();
    let dense = table.dense();
    let entries: Vec<(usize, usize, usize, f64)> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
        .filter_map(|(a, b, c)| {
            let v = dense[(a * n + b) * n + c];
            (v != 0.0).then_some((a, b, c, v))
        })
        .collect();
    let pairs = (entries.len() as u128).pow(2);
    if pairs > CIRCULANT_PAIR_BUDGET {
        return Err(Error::Budget {
            what: "circulant sum index pairs",
            needed: pairs,
            limit: CIRCULANT_PAIR_BUDGET,
        });
    }
    let at = |a: usize, b: usize, c: usize| dense[(a * n + b) * n + c];
    let partial: Vec<f64> = entries
        .iter()
        .map(|&(m1, a2, a3, v1)| {
            let terms: Vec<f64> = entries
                .iter()
                .map(|&(m1p, b2, b3, v2)| v1 * v2 * at(m1, b2, b3) * at(m1p, a2, a3))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let scale = (sphere_surface(table.d()) / n as f64).powi(6);
    Ok(scale * pairwise_sum(&partial))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CirculantClosed {
    /// `|S^d|^6 n^{-5} g²`
    pub value: f64,
    /// `g_{ℓ;d}`
    pub g: f64,
}

/// Closed form of the circulant-diagram integral for even `ℓ`.
pub fn circulant_closed(d: u32, l: u32) -> Result<CirculantClosed> {
    if l % 2 == 1 {
        return domain(format!("closed circulant form needs even ℓ, got {l}"));
    }
    let g = g_value(d, l)?;
    let n = eigenspace_dim(d, l)? as f64;
    Ok(CirculantClosed {
        value: sphere_surface(d).powi(6) * n.powi(-5) * g * g,
        g,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cum4Ratio {
    pub d: u32,
    pub l: u32,
    pub ratio: f64,
    /// circulant-diagram proxy for the fourth cumulant
    pub numerator: f64,
    /// `Var(∫ H_3(T_ℓ))² = (3! |S^d| |S^{d-1}| ∫_0^π G³ sin^{d-1})²`
    pub denominator: f64,
    /// the ratio is expected to decay like `ℓ^{predicted_exponent}`
    pub predicted_exponent: f64,
}

/// Fourth cumulant over squared variance of `∫ H_3(T_ℓ)`, with the
/// circulant diagram standing in for the full cumulant.
pub fn cum4_ratio(d: u32, l: u32) -> Result<Cum4Ratio> {
    let numerator = circulant_closed(d, l)?.value;
    let var = 6.0
        * sphere_surface(d)
        * sphere_surface(d - 1)
        * gegenbauer_moment(d, l, 3, MomentRange::Full)?;
    let denominator = var * var;
    Ok(Cum4Ratio {
        d,
        l,
        ratio: numerator / denominator,
        numerator,
        denominator,
        predicted_exponent: -(f64::from(d) - 1.0),
    })
}
