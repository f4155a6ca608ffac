use rayon::prelude::*;
use serde::Serialize;

use crate::numeric::pairwise_sum;
use crate::spherequad::gauss_legendre;
use crate::{Error, Result};

/// Parameters for [`integrate_lobes`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LobeOptions {
    /// Gauss–Legendre nodes per lobe
    pub nodes: usize,
    /// composite panels on the first lobe, where peaked integrands live
    pub first_panels: usize,
    /// number of repeated averaging passes (Euler transformation)
    pub order: usize,
    /// accepted relative error of the accelerated limit
    pub tol: f64,
}

impl Default for LobeOptions {
    fn default() -> Self {
        Self {
            nodes: 32,
            first_panels: 16,
            order: 12,
            tol: 1e-9,
        }
    }
}

/// Result of an accelerated lobe integration.
#[derive(Debug, Clone, Serialize)]
pub struct LobeIntegral {
    pub value: f64,
    pub error: f64,
    pub lobes: usize,
    pub order: usize,
    /// the last `order + 2` partial sums fed to the transformation
    pub tableau: Vec<f64>,
}

/// `∫_0^∞ f` for an integrand whose sign alternates between consecutive
/// `breakpoints` (with an implicit leading zero).
///
/// Each lobe is integrated by Gauss–Legendre and the sequence of partial
/// sums is accelerated by `order` passes of neighbour averaging. The error
/// estimate compares against the same transform one lobe earlier and one
/// order lower.
pub fn integrate_lobes<F>(f: F, breakpoints: &[f64], opts: &LobeOptions) -> Result<LobeIntegral>
where
    F: Fn(f64) -> f64 + Sync,
{
    let order = opts.order.max(1);
    if breakpoints.len() < order + 3 {
        return Err(Error::Domain(format!(
            "need at least {} lobes for order {order}, got {}",
            order + 3,
            breakpoints.len()
        )));
    }
    let rule = gauss_legendre(opts.nodes)?;
    let panels = opts.first_panels.max(1);
    let lobe = |k: usize| -> f64 {
        let a = if k == 0 { 0.0 } else { breakpoints[k - 1] };
        let b = breakpoints[k];
        if k == 0 {
            let h = (b - a) / panels as f64;
            let parts: Vec<f64> = (0..panels)
                .map(|i| {
                    rule.mapped(a + h * i as f64, a + h * (i + 1) as f64)
                        .integrate(&f)
                })
                .collect();
            pairwise_sum(&parts)
        } else {
            rule.mapped(a, b).integrate(&f)
        }
    };
    let lobes: Vec<f64> = (0..breakpoints.len()).into_par_iter().map(lobe).collect();
    let mut partial = Vec::with_capacity(lobes.len());
    let mut acc = 0.0;
    for v in &lobes {
        acc += v;
        partial.push(acc);
    }
    let n = partial.len();
    let value = average(&partial[n - order - 1..], order);
    let earlier = average(&partial[n - order - 2..n - 1], order);
    let lower = average(&partial[n - order..], order - 1);
    let error = (value - earlier).abs().max((value - lower).abs());
    let tableau = partial[n - order - 2..].to_vec();
    if !value.is_finite() || error > opts.tol * value.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotConverged {
            message: format!(
                "lobe acceleration: value {value:e}, error {error:e} over {n} lobes at order {order}"
            ),
            tableau,
        });
    }
    Ok(LobeIntegral {
        value,
        error,
        lobes: n,
        order,
        tableau,
    })
}

// `passes` rounds of neighbour averaging over `sums.len() == passes + 1` values.
fn average(sums: &[f64], passes: usize) -> f64 {
    debug_assert_eq!(sums.len(), passes + 1);
    let mut row = sums.to_vec();
    for _ in 0..passes {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row[0]
}
