//! End-to-end acceptance checks, one per criterion, each reporting a
//! pass/fail flag with the measured numbers.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::chaos::{
    c_coefficient, constant_estimate, constant_lower_bound, exact_variance, facile_check,
    indicator_l2_sums, weight_tail, ChaosCoefficients, ConstantMethod,
};
use crate::harmonics::{build_basis, circulant_closed, circulant_sum, gaunt_table, lemcg_check};
use crate::montecarlo::{clt_experiment, defect_realizations, min_resolution, CltConfig};
use crate::numeric::{log_log_slope, rel_diff};
use crate::specfun::{eigenspace_dim, sphere_surface, GegenbauerEvaluator};
use crate::spherequad::build_grid;
use crate::Result;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let flag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{flag}] criterion {:>2} {}: {}",
            self.id, self.name, self.detail
        )
    }
}

/// Names of criteria `1..=10`.
pub const NAMES: [&str; 10] = [
    "c3 closed form",
    "C_2 two-method agreement",
    "variance asymptotics",
    "double-sum Gaunt identity",
    "circulant reduction",
    "chaos-weight identities",
    "Monte Carlo consistency",
    "structural zeros",
    "combinatorial inequalities",
    "basis integrity",
];

/// Seed used by the Monte Carlo criterion.
pub const MC_SEED: u64 = 20_240_601;

/// Runs criterion `id` (1-based). Numerical errors count as failures.
pub fn run(id: u8) -> Criterion {
    let name = NAMES[usize::from(id) - 1];
    let outcome = match id {
        1 => c3_closed_form(),
        2 => two_method_constant(),
        3 => variance_asymptotics(),
        4 => gaunt_identity(),
        5 => circulant_reduction(),
        6 => weight_identities(),
        7 => monte_carlo(),
        8 => structural_zeros(),
        9 => inequalities(),
        10 => basis_integrity(),
        _ => unreachable!("criteria are numbered 1..=10"),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Criterion {
        id,
        name,
        passed,
        detail,
    }
}

/// All criteria in order.
pub fn run_all() -> Vec<Criterion> {
    (1..=10).map(run).collect()
}

type Outcome = Result<(bool, String)>;

fn c3_closed_form() -> Outcome {
    let c = c_coefficient(2, 1)?;
    let closed = c.closed_form.expect("q = 1 has a closed form");
    let exact = 2.0 / (PI * 3f64.sqrt());
    let closed_err = (closed - exact).abs();
    let quad_err = (c.value - closed).abs();
    Ok((
        closed_err < 1e-12 && quad_err < 1e-4,
        format!(
            "closed {closed:.15} (err {closed_err:.1e}), quadrature {:.15} (diff {quad_err:.1e})",
            c.value
        ),
    ))
}

fn two_method_constant() -> Outcome {
    let s = constant_estimate(2, ConstantMethod::Series)?;
    let i = constant_estimate(2, ConstantMethod::Integral)?;
    let bound = 32.0 / 27f64.sqrt();
    let agree = rel_diff(s.value, i.value);
    let mut ok = agree < 1e-3 && s.value > bound && i.value > bound;
    let mut detail = format!(
        "d=2 series {:.10} integral {:.10} rel diff {agree:.1e}, bound {bound:.6}",
        s.value, i.value
    );
    for d in 3..=5 {
        let lb = constant_lower_bound(d)?;
        let s = constant_estimate(d, ConstantMethod::Series)?;
        let i = constant_estimate(d, ConstantMethod::Integral)?;
        ok &= s.value > lb && i.value > lb;
        detail += &format!("; d={d} {:.6}/{:.6} > {lb:.6}", s.value, i.value);
    }
    Ok((ok, detail))
}

fn variance_asymptotics() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for (d, ls, limit) in [
        (2u32, &[100u32, 200, 400][..], 0.05),
        (3, &[50, 100][..], 0.10),
    ] {
        let c = constant_estimate(d, ConstantMethod::Integral)?.value;
        let mut prev = f64::INFINITY;
        for &l in ls {
            let v = exact_variance(d, l, 1e-4)?;
            let scaled = f64::from(l).powi(d as i32) * v.value;
            let dev = rel_diff(scaled, c);
            ok &= dev < limit;
            if d == 2 {
                ok &= dev < prev;
            }
            prev = dev;
            detail += &format!(
                "d={d} l={l}: {scaled:.6} vs {c:.6} ({:+.3}%); ",
                100.0 * (scaled / c - 1.0)
            );
        }
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

// ∫_{-1}^1 P_ℓ³ = 2 (ℓ ℓ ℓ; 0 0 0)², from the closed form of the 3j symbol.
fn legendre_cubic_integral(l: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    let g = 3 * l / 2;
    let sq = fact(l).powi(3) / fact(3 * l + 1) * (fact(g) / fact(g - l).powi(3)).powi(2);
    2.0 * sq
}

fn gaunt_identity() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for (d, l) in [(2u32, 2u32), (2, 4), (3, 2)] {
        let r = lemcg_check(&gaunt_table(d, l)?)?;
        ok &= r.max_offdiag < 1e-9 && r.max_diag_rel < 1e-9;
        detail += &format!(
            "({d},{l}) off {:.1e} diag {:.1e}",
            r.max_offdiag, r.max_diag_rel
        );
        if d == 2 {
            let n = 2.0 * f64::from(l) + 1.0;
            let expected = n * n / (8.0 * PI) * legendre_cubic_integral(l);
            let worst = (0..r.n)
                .map(|m| rel_diff(r.residuals[m * r.n + m] + r.g, expected))
                .fold(0.0, f64::max);
            ok &= worst < 1e-9;
            detail += &format!(" vs Legendre {worst:.1e}");
        }
        detail += "; ";
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

fn circulant_reduction() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for (d, l) in [(2u32, 2u32), (2, 4), (3, 2)] {
        let sum = circulant_sum(&gaunt_table(d, l)?)?;
        let closed = circulant_closed(d, l)?.value;
        let err = rel_diff(sum, closed);
        ok &= err < 1e-9;
        detail += &format!("({d},{l}) rel {err:.1e}; ");
    }
    let ls: Vec<u32> = (1..=20).map(|k| 2 * k).collect();
    let x: Vec<f64> = ls.iter().map(|&l| f64::from(l)).collect();
    // the dimensions the Gaunt tables above live in
    for d in [2u32, 3] {
        let g = ls
            .iter()
            .map(|&l| Ok(circulant_closed(d, l)?.g))
            .collect::<Result<Vec<f64>>>()?;
        let slope = log_log_slope(&x, &g);
        ok &= (slope - (f64::from(d) - 2.0)).abs() <= 0.2;
        detail += &format!("slope d={d} {slope:.3}; ");
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

fn weight_identities() -> Outcome {
    let q = 100_000u64;
    let w = ChaosCoefficients::new(q as usize)?;
    let completed = w.partial_sum() + weight_tail(q);
    let err_w = (completed - (1.0 - 2.0 / PI)).abs();
    let l2 = indicator_l2_sums(q);
    let gap = 0.25 - l2.from_zero;
    let err_l2 = (l2.from_zero + weight_tail(q) / 4.0 - 0.25).abs();
    let from_one = l2.from_one + weight_tail(q) / 4.0;
    let err_one = (from_one - (0.25 - 1.0 / (2.0 * PI))).abs();
    Ok((
        err_w < 1e-10 && err_l2 < 1e-8 && gap >= 0.0 && gap <= l2.tail_bound,
        format!(
            "Σw_q err {err_w:.1e}; L² sum from q=0 err {err_l2:.1e} \
             (partial sum at Q={q} short by {gap:.2e} <= bound {:.2e}); \
             sum from q=1 is {from_one:.12}, 1/4 - 1/(2π) err {err_one:.1e}",
            l2.tail_bound
        ),
    ))
}

fn monte_carlo() -> Outcome {
    let cfg = CltConfig {
        seed: MC_SEED,
        ..CltConfig::default()
    };
    let r = clt_experiment(2, 20, 2000, &cfg)?.diagnostics;
    let mean_ok = r.mean.abs() <= 3.0 * r.mean_se;
    let var_ok = (r.variance - 1.0).abs() <= 0.1;
    let w1_ok = r.w1 < 0.08;
    let w8 = clt_experiment(2, 8, 2000, &cfg)?.diagnostics.w1;
    let w32 = clt_experiment(2, 32, 2000, &cfg)?.diagnostics.w1;
    Ok((
        mean_ok && var_ok && w1_ok && w32 <= w8,
        format!(
            "l=20: mean {:.4} (SE {:.4}), var ratio {:.4}, W1 {:.4}, KS {:.4}; W1 l=8 {w8:.4}, l=32 {w32:.4}",
            r.mean, r.mean_se, r.variance, r.w1, r.ks
        ),
    ))
}

fn structural_zeros() -> Outcome {
    let mut ok = true;
    for d in 2..=5 {
        for l in [1, 3, 5, 11, 51] {
            ok &= exact_variance(d, l, 1e-6)?.value == 0.0;
        }
    }
    let mut count = 0;
    for (d, l) in [(2u32, 5u32), (2, 21), (3, 3), (3, 7)] {
        let cfg = CltConfig {
            resolution: Some(min_resolution(l)),
            ..CltConfig::default()
        };
        let defects = defect_realizations(d, l, 200, &cfg)?;
        count += defects.len();
        ok &= defects.iter().all(|&x| x == 0.0);
    }
    Ok((
        ok,
        format!("odd-ℓ variances zero for d=2..5; {count} odd-ℓ defect realizations checked"),
    ))
}

fn inequalities() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for q in 1..=6 {
        for p in q..=6 {
            checked += 1;
            if !facile_check(q, p)?.holds() {
                failures.push(format!("({q},{p})"));
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "{checked} pairs checked, failures: [{}]",
            failures.join(", ")
        ),
    ))
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / r).collect()
}

fn basis_integrity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst_add, mut worst_gram): (f64, f64) = (0.0, 0.0);
    let cases = (0..=8u32).map(|l| (2u32, l)).chain((0..=4).map(|l| (3, l)));
    for (d, l) in cases {
        let basis = build_basis(d, l)?;
        let n = basis.len();
        let coef = eigenspace_dim(d, l)? as f64 / sphere_surface(d);
        let ev = GegenbauerEvaluator::new(d, l)?;
        let (mut yx, mut yy) = (vec![0.0; n], vec![0.0; n]);
        for _ in 0..100 {
            let x = random_unit(&mut rng, d as usize + 1);
            let y = random_unit(&mut rng, d as usize + 1);
            basis.eval_all(&x, &mut yx);
            basis.eval_all(&y, &mut yy);
            let lhs: f64 = yx.iter().zip(&yy).map(|(a, b)| a * b).sum();
            let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            worst_add = worst_add.max((lhs - coef * ev.eval(dot.clamp(-1.0, 1.0))).abs());
        }
        let grid = Arc::new(build_grid(d, 2 * u64::from(l))?);
        let b = basis.sample_matrix(&grid)?;
        for a in 0..n {
            for c in a..n {
                let g: f64 = grid
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(p, w)| w * b[p * n + a] * b[p * n + c])
                    .sum();
                worst_gram = worst_gram.max((g - if a == c { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok((
        worst_add < 1e-10 && worst_gram < 1e-10,
        format!("addition residual {worst_add:.1e}, Gram error {worst_gram:.1e}"),
    ))
}
