use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::oscillatory::{integrate_lobes, LobeOptions};
use super::weights::{chaos_weight, ChaosCoefficients};
use crate::numeric::pairwise_sum;
use crate::specfun::{gamma_half, ln_gamma, sphere_surface, ScaledBesselKernel};
use crate::{error::domain, Error, Result};

const LOBES: usize = 64;
const SERIES_Q: usize = 120;
const MODEL_Q: u64 = 200_000;

/// `c_{2q+1;d} = ∫_0^∞ J̃_d(ψ)^{2q+1} ψ^{d-1} dψ`.
#[derive(Debug, Clone, Serialize)]
pub struct CCoefficient {
    pub d: u32,
    pub q: u64,
    pub value: f64,
    pub error: f64,
    /// exact value, available for `q = 1`
    pub closed_form: Option<f64>,
    pub lobes: usize,
    pub order: usize,
}

/// Exact `c_{3;d} = 2 Γ(d/2)³ 3^{(d-3)/2} / (√π Γ((d-1)/2))`.
pub fn c3_closed_form(d: u32) -> Result<f64> {
    if d < 2 {
        return domain(format!("sphere dimension d = {d} must be >= 2"));
    }
    let x = f64::from(d);
    if d <= 12 {
        let g = gamma_half(d);
        return Ok(2.0 * g.powi(3) * 3f64.powf((x - 3.0) / 2.0) / (PI.sqrt() * gamma_half(d - 1)));
    }
    let ln = std::f64::consts::LN_2 + 3.0 * ln_gamma(x / 2.0) + (x - 3.0) / 2.0 * 3f64.ln()
        - 0.5 * PI.ln()
        - ln_gamma((x - 1.0) / 2.0);
    Ok(ln.exp())
}

/// `c_{2q+1;d}` by integrating between consecutive zeros of `J_{d/2-1}` and
/// accelerating the alternating lobe series.
pub fn c_coefficient(d: u32, q: u64) -> Result<CCoefficient> {
    c_coefficient_with(d, q, &LobeOptions::default())
}

fn c_coefficient_with(d: u32, q: u64, opts: &LobeOptions) -> Result<CCoefficient> {
    if q == 0 {
        return domain("c coefficient order q must be >= 1");
    }
    if q > 10_000 {
        return domain(format!("c coefficient order q = {q} above 10000"));
    }
    let kernel = ScaledBesselKernel::new(d)?;
    let zeros = kernel.zeros(LOBES);
    let power = (2 * q + 1) as i32;
    let dim = d as i32;
    let f = |psi: f64| kernel.eval(psi).powi(power) * psi.powi(dim - 1);
    let r = integrate_lobes(f, &zeros, opts)?;
    Ok(CCoefficient {
        d,
        q,
        value: r.value,
        error: r.error,
        closed_form: if q == 1 {
            Some(c3_closed_form(d)?)
        } else {
            None
        },
        lobes: r.lobes,
        order: r.order,
    })
}

/// The strict lower bound `C_d > 2|S^d||S^{d-1}| w_1 c_{3;d}` obtained by
/// keeping only the first chaos term.
pub fn constant_lower_bound(d: u32) -> Result<f64> {
    Ok(2.0 * sphere_surface(d) * sphere_surface(d - 1) * chaos_weight(1)? * c3_closed_form(d)?)
}

/// How [`constant_estimate`] evaluates `C_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantMethod {
    /// `2|S^d||S^{d-1}| Σ_q w_q c_{2q+1;d}`
    Series,
    /// `(4/π)|S^d||S^{d-1}| ∫_0^∞ ψ^{d-1} (arcsin J̃ - J̃) dψ`
    Integral,
}

impl std::fmt::Display for ConstantMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConstantMethod::Series => "series",
            ConstantMethod::Integral => "integral",
        })
    }
}

impl std::str::FromStr for ConstantMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(ConstantMethod::Series),
            "integral" => Ok(ConstantMethod::Integral),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Estimate of the limiting constant `C_d = lim ℓ^d Var(D_ℓ)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantEstimate {
    pub d: u32,
    pub method: ConstantMethod,
    pub value: f64,
    pub error: f64,
    /// chaos orders computed explicitly (series method only)
    pub q_max: usize,
    pub lobes: usize,
    pub order: usize,
    pub lower_bound: f64,
}

/// `C_d` for `d ∈ {2, 3, 4, 5}`.
pub fn constant_estimate(d: u32, method: ConstantMethod) -> Result<ConstantEstimate> {
    if !(2..=5).contains(&d) {
        return domain(format!("constant estimate supports d in 2..=5, got {d}"));
    }
    let lower_bound = constant_lower_bound(d)?;
    let pref = 2.0 * sphere_surface(d) * sphere_surface(d - 1);
    let opts = LobeOptions::default();
    match method {
        ConstantMethod::Series => {
            let (sum, error) = series_sum(d, &opts)?;
            Ok(ConstantEstimate {
                d,
                method,
                value: pref * sum,
                error: pref * error,
                q_max: SERIES_Q,
                lobes: LOBES,
                order: opts.order,
                lower_bound,
            })
        }
        ConstantMethod::Integral => {
            let kernel = ScaledBesselKernel::new(d)?;
            let zeros = kernel.zeros(LOBES);
            let dim = d as i32;
            let f = |psi: f64| {
                let u = kernel.one_minus(psi);
                let diff = if u < 0.5 {
                    // arcsin(1 - u) = π/2 - 2 arcsin(√(u/2))
                    PI / 2.0 - 2.0 * (u / 2.0).sqrt().asin() - (1.0 - u)
                } else {
                    let j = kernel.eval(psi).clamp(-1.0, 1.0);
                    j.asin() - j
                };
                diff * psi.powi(dim - 1)
            };
            let r = integrate_lobes(f, &zeros, &opts)?;
            let scale = pref * 2.0 / PI;
            Ok(ConstantEstimate {
                d,
                method,
                value: scale * r.value,
                error: scale * r.error,
                q_max: 0,
                lobes: r.lobes,
                order: r.order,
                lower_bound,
            })
        }
    }
}

// Σ_q w_q c_{2q+1;d}: explicit terms for q <= SERIES_Q, then a fitted
// Laplace-type model c_n n^{d/2} ≈ A + B/n + C/n² (n = 2q+1) beyond.
fn series_sum(d: u32, opts: &LobeOptions) -> Result<(f64, f64)> {
    let coeffs = ChaosCoefficients::new(SERIES_Q)?;
    let cs = (1..=SERIES_Q as u64)
        .map(|q| c_coefficient_with(d, q, opts))
        .collect::<Result<Vec<_>>>()?;
    let head: Vec<f64> = cs
        .iter()
        .map(|c| coeffs.weight(c.q as usize) * c.value)
        .collect();
    let head_error: f64 = cs
        .iter()
        .map(|c| coeffs.weight(c.q as usize) * c.error)
        .sum();

    let half_d = f64::from(d) / 2.0;
    let fit_range = &cs[SERIES_Q / 2 - 1..];
    let model3 = fit_model(fit_range, half_d, 3)?;
    let model2 = fit_model(fit_range, half_d, 2)?;
    let tail3 = model_tail(&model3, half_d);
    let tail2 = model_tail(&model2, half_d);
    Ok((
        pairwise_sum(&head) + tail3,
        head_error + (tail3 - tail2).abs(),
    ))
}

// Least squares in the centred variable s = 4(n_max/n) - 3 ∈ [-1, 1].
struct Model {
    coef: Vec<f64>,
    n_max: f64,
}

impl Model {
    fn eval(&self, n: f64) -> f64 {
        let s = 4.0 * self.n_max / n - 3.0;
        self.coef.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

fn fit_model(cs: &[super::CCoefficient], half_d: f64, terms: usize) -> Result<Model> {
    let n_max = (2 * cs.last().map_or(1, |c| c.q) + 1) as f64;
    let a = DMatrix::from_fn(cs.len(), terms, |i, j| {
        let n = (2 * cs[i].q + 1) as f64;
        (4.0 * n_max / n - 3.0).powi(j as i32)
    });
    let b = DVector::from_iterator(
        cs.len(),
        cs.iter().map(|c| {
            let n = (2 * c.q + 1) as f64;
            c.value * n.powf(half_d)
        }),
    );
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Factorization(e.to_string()))?;
    Ok(Model {
        coef: coef.iter().copied().collect(),
        n_max,
    })
}

fn model_tail(model: &Model, half_d: f64) -> f64 {
    let terms: Vec<f64> = (SERIES_Q as u64 + 1..=MODEL_Q)
        .map(|q| {
            let n = (2 * q + 1) as f64;
            let w = chaos_weight(q).expect("order within range");
            w * model.eval(n) * n.powf(-half_d)
        })
        .collect();
    // beyond MODEL_Q: w_q ≈ π^{-3/2} q^{-3/2}, c ≈ A (2q)^{-d/2}
    let a = model.eval(f64::INFINITY);
    let x = MODEL_Q as f64;
    let s = 0.5 + half_d;
    let rest = a * PI.powf(-1.5) * 2f64.powf(-half_d) * x.powf(-s) / s;
    pairwise_sum(&terms) + rest
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn c3_closed_forms() {
        assert_relative_eq!(
            c3_closed_form(2).unwrap(),
            2.0 / (PI * 3f64.sqrt()),
            max_relative = 1e-14
        );
        assert_relative_eq!(c3_closed_form(3).unwrap(), PI / 4.0, max_relative = 1e-14);
        // log-gamma branch agrees with the exact branch
        for d in 2..=12u32 {
            let ln = std::f64::consts::LN_2
                + 3.0 * ln_gamma(f64::from(d) / 2.0)
                + (f64::from(d) - 3.0) / 2.0 * 3f64.ln()
                - 0.5 * PI.ln()
                - ln_gamma((f64::from(d) - 1.0) / 2.0);
            assert_relative_eq!(ln.exp(), c3_closed_form(d).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn c3_quadrature_matches_closed_form() {
        for d in 2..=6 {
            let c = c_coefficient(d, 1).unwrap();
            let exact = c.closed_form.unwrap();
            assert!(
                (c.value - exact).abs() < 1e-8 * exact,
                "d={d}: {} vs {exact}",
                c.value
            );
            assert!(c.error < 1e-8 * exact);
        }
    }

    // Independent values from 50-digit arbitrary-precision quadrature.
    #[test]
    fn higher_coefficients() {
        let table = [
            (2, 2, 0.32993380106),
            (2, 3, 0.260849530169),
            (3, 2, 0.490873852123),
            (3, 3, 0.314977388446),
            (4, 2, 1.03673193978),
            (4, 3, 0.564345755867),
            (5, 2, 2.8986320108),
            (5, 3, 1.35011861747),
        ];
        for (d, q, expected) in table {
            let c = c_coefficient(d, q).unwrap();
            assert!(
                (c.value - expected).abs() < 1e-9 * expected,
                "d={d} q={q}: {}",
                c.value
            );
        }
        // d = 3 c_5 is 5π/32
        assert_relative_eq!(
            c_coefficient(3, 2).unwrap().value,
            5.0 * PI / 32.0,
            max_relative = 1e-10
        );
    }

    #[test]
    fn laplace_limit() {
        // c_n n^{d/2} -> Γ(d/2) (2d)^{d/2} / 2
        for d in 2..=5u32 {
            let c = c_coefficient(d, 400).unwrap();
            let n: f64 = 801.0;
            let half = f64::from(d) / 2.0;
            let limit = gamma_half(d) * (2.0 * f64::from(d)).powf(half) / 2.0;
            assert_relative_eq!(c.value * n.powf(half), limit, max_relative = 1e-2);
        }
    }

    #[test]
    fn lower_bound_d2() {
        assert_relative_eq!(
            constant_lower_bound(2).unwrap(),
            32.0 / 27f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn constant_methods_agree() {
        let reference = [
            (2, 12.1114388196684),
            (3, 63.4661319647071),
            (4, 328.291795483003),
            (5, 1715.71253734257),
        ];
        for (d, expected) in reference {
            let s = constant_estimate(d, ConstantMethod::Series).unwrap();
            let i = constant_estimate(d, ConstantMethod::Integral).unwrap();
            assert!(
                (s.value - expected).abs() < 1e-6 * expected,
                "series d={d}: {}",
                s.value
            );
            assert!(
                (i.value - expected).abs() < 1e-8 * expected,
                "integral d={d}: {}",
                i.value
            );
            assert!((s.value - i.value).abs() <= 2.0 * (s.error + i.error) + 1e-9 * expected);
            assert!(s.value > s.lower_bound && i.value > i.lower_bound);
        }
        assert!(constant_estimate(6, ConstantMethod::Series).is_err());
    }

    #[test]
    fn method_parse_roundtrip() {
        for m in [ConstantMethod::Series, ConstantMethod::Integral] {
            assert_eq!(m.to_string().parse::<ConstantMethod>().unwrap(), m);
        }
        assert!("both".parse::<ConstantMethod>().is_err());
    }
}
