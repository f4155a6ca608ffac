use std::f64::consts::PI;

use serde::Serialize;

use crate::numeric::pairwise_sum;
use crate::specfun::{gamma_ratio_half, hermite_at_zero};
use crate::{error::domain, Result};

/// Largest order accepted by [`chaos_weight`].
pub const MAX_WEIGHT_ORDER: u64 = 1_000_000;

/// `w_q = J²_{2q+1} / (2q+1)! = (2/π) (2q)! / (4^q (q!)² (2q+1))`, the
/// Taylor coefficients of `(2/π) arcsin`.
pub fn chaos_weight(q: u64) -> Result<f64> {
    if q == 0 || q > MAX_WEIGHT_ORDER {
        return domain(format!(
            "chaos weight order q = {q} outside 1..={MAX_WEIGHT_ORDER}"
        ));
    }
    Ok(weight_unchecked(q))
}

fn weight_unchecked(q: u64) -> f64 {
    // (2q)! / (4^q (q!)²) = Π_{j<=q} (2j-1)/(2j) = Γ(q+1/2) / (√π Γ(q+1))
    let central = if q <= 40 {
        (1..=q).fold(1.0, |acc, j| acc * (2 * j - 1) as f64 / (2 * j) as f64)
    } else {
        gamma_ratio_half(q as f64) / PI.sqrt()
    };
    2.0 / PI * central / (2 * q + 1) as f64
}

/// `J_{2q+1} = 2 φ(0) H_{2q}(0)`; overflows to infinity past `q ≈ 150`.
pub fn j_coefficient(q: u64) -> f64 {
    2.0 / (2.0 * PI).sqrt() * hermite_at_zero(2 * q)
}

/// Certified bound `Σ_{q>Q} w_q <= 2 π^{-3/2} / √Q`.
///
/// `w_q q^{3/2}` increases to `π^{-3/2}`, so the tail is dominated by
/// `∫_Q^∞ π^{-3/2} x^{-3/2} dx`.
pub fn weight_tail_bound(q_max: u64) -> f64 {
    assert!(q_max >= 1);
    2.0 * PI.powf(-1.5) / (q_max as f64).sqrt()
}

// √x Γ(x+1/2)/Γ(x+1) ~ Σ c_j x^{-j}
const RATIO: [f64; 7] = [
    1.0,
    -1.0 / 8.0,
    1.0 / 128.0,
    5.0 / 1024.0,
    -21.0 / 32768.0,
    -399.0 / 262144.0,
    869.0 / 4194304.0,
];

/// `Σ_{q>Q} w_q` to near rounding accuracy, by Euler–Maclaurin summation
/// of the asymptotic expansion of `w_q`.
pub fn weight_tail(q_max: u64) -> f64 {
    const START: u64 = 64;
    if q_max < START {
        let head: Vec<f64> = (q_max + 1..=START).map(weight_unchecked).collect();
        return pairwise_sum(&head) + weight_tail(START);
    }
    // w(x) = π^{-3/2} Σ_n e_n x^{-3/2-n}, with 1/(2x+1) = (1/2x) Σ (-1/2x)^k.
    let mut e = [0.0; RATIO.len()];
    for (n, en) in e.iter_mut().enumerate() {
        for (j, c) in RATIO.iter().enumerate().take(n + 1) {
            *en += c * (-0.5f64).powi((n - j) as i32);
        }
    }
    let x = q_max as f64;
    let mut total = 0.0;
    for (n, en) in e.iter().enumerate() {
        let s = 1.5 + n as f64;
        let integral = x.powf(1.0 - s) / (s - 1.0);
        let f = x.powf(-s);
        let d1 = -s * x.powf(-s - 1.0);
        let d3 = -s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0);
        let d5 = -s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * x.powf(-s - 5.0);
        let em = integral - f / 2.0 - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0;
        total += en * em;
    }
    total * PI.powf(-1.5)
}

/// Weights `w_1..w_Q` together with `J_{2q+1} / √((2q+1)!) = (-1)^q √w_q`.
#[derive(Debug, Clone, Serialize)]
pub struct ChaosCoefficients {
    weights: Vec<f64>,
    normalized_j: Vec<f64>,
}

impl ChaosCoefficients {
    pub fn new(q_max: usize) -> Result<Self> {
        if q_max as u64 > MAX_WEIGHT_ORDER {
            return domain(format!("Q = {q_max} exceeds {MAX_WEIGHT_ORDER}"));
        }
        let weights: Vec<f64> = (1..=q_max as u64).map(weight_unchecked).collect();
        let normalized_j = weights
            .iter()
            .enumerate()
            .map(|(i, w)| if i % 2 == 0 { -w.sqrt() } else { w.sqrt() })
            .collect();
        Ok(Self {
            weights,
            normalized_j,
        })
    }

    pub fn q_max(&self) -> usize {
        self.weights.len()
    }

    /// `w_q` for `q = 1..=Q` (index `q - 1`).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, q: usize) -> f64 {
        self.weights[q - 1]
    }

    /// `J_{2q+1} / √((2q+1)!)` (index `q - 1`).
    pub fn normalized_j(&self) -> &[f64] {
        &self.normalized_j
    }

    pub fn partial_sum(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

/// `L²` norm of the odd-chaos expansion of `1_{(0,∞)}(Z)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndicatorL2 {
    /// `Σ_{q>=0} (φ(0) H_{2q}(0))² / (2q+1)!`, which equals `Φ(0)(1-Φ(0)) = 1/4`
    pub from_zero: f64,
    /// the same sum without the first-chaos term `q = 0`
    pub from_one: f64,
    /// certified bound on the omitted tail `q > Q`
    pub tail_bound: f64,
    pub q_max: u64,
}

/// Partial sums of `(φ(0) H_{2q}(0))² / (2q+1)!` up to `Q`, with terms
/// evaluated from Hermite values where they fit in a double.
pub fn indicator_l2_sums(q_max: u64) -> IndicatorL2 {
    let phi0_sq = 1.0 / (2.0 * PI);
    let terms: Vec<f64> = (1..=q_max)
        .map(|q| {
            if q <= 60 {
                let h = hermite_at_zero(2 * q);
                let fact: f64 = (1..=2 * q + 1).map(|k| k as f64).product();
                phi0_sq * h * h / fact
            } else {
                weight_unchecked(q) / 4.0
            }
        })
        .collect();
    let from_one = pairwise_sum(&terms);
    IndicatorL2 {
        from_zero: phi0_sq + from_one,
        from_one,
        tail_bound: weight_tail_bound(q_max) / 4.0,
        q_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_weights() {
        assert_relative_eq!(
            chaos_weight(1).unwrap(),
            1.0 / (3.0 * PI),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            chaos_weight(2).unwrap(),
            2.0 / PI * 3.0 / 40.0,
            max_relative = 1e-15
        );
        assert!(chaos_weight(0).is_err());
        assert!(chaos_weight(MAX_WEIGHT_ORDER + 1).is_err());
        assert!(chaos_weight(MAX_WEIGHT_ORDER).is_ok());
    }

    #[test]
    fn weights_match_hermite_definition() {
        for q in 1..=60u64 {
            let j = j_coefficient(q);
            let fact: f64 = (1..=2 * q + 1).map(|k| k as f64).product();
            assert_relative_eq!(j * j / fact, chaos_weight(q).unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn branch_continuity() {
        // product form vs gamma-ratio form around the switch
        for q in [38u64, 39, 40, 41, 42, 45] {
            let product = (1..=q).fold(1.0, |acc, j| acc * (2 * j - 1) as f64 / (2 * j) as f64);
            assert_relative_eq!(
                weight_unchecked(q),
                2.0 / PI * product / (2 * q + 1) as f64,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn monotone_and_scaled_limit() {
        let c = ChaosCoefficients::new(20_000).unwrap();
        let w = c.weights();
        let mut prev_scaled = 0.0;
        for (i, pair) in w.windows(2).enumerate() {
            assert!(pair[1] < pair[0]);
            let q = (i + 1) as f64;
            let scaled = pair[0] * q.powf(1.5);
            assert!(scaled > prev_scaled && scaled < PI.powf(-1.5));
            prev_scaled = scaled;
        }
        let at = |q: usize| c.weight(q) * (q as f64).powf(1.5);
        assert!((at(10_000) / at(20_000) - 1.0).abs() < 0.01);
        assert!((at(10_000) * PI.powf(1.5) - 1.0).abs() < 0.01);
    }

    #[test]
    fn weight_sum_identity() {
        let target = 1.0 - 2.0 / PI;
        for q in [10u64, 100, 1000, 100_000] {
            let c = ChaosCoefficients::new(q as usize).unwrap();
            let completed = c.partial_sum() + weight_tail(q);
            assert!(
                (completed - target).abs() < 1e-13,
                "Q = {q}: {}",
                completed - target
            );
            let missing = target - c.partial_sum();
            assert!(missing > 0.0 && missing <= weight_tail_bound(q));
        }
    }

    #[test]
    fn tail_against_direct_sum() {
        let direct: Vec<f64> = (101..=2_000_000u64).map(weight_unchecked).collect();
        let rest = weight_tail(2_000_000);
        assert_relative_eq!(
            pairwise_sum(&direct) + rest,
            weight_tail(100),
            max_relative = 1e-12
        );
    }

    #[test]
    fn indicator_variance() {
        let s = indicator_l2_sums(100_000);
        assert!((s.from_zero - 0.25).abs() <= s.tail_bound);
        assert!((s.from_zero + weight_tail(100_000) / 4.0 - 0.25).abs() < 1e-13);
        assert!(
            (s.from_one + weight_tail(100_000) / 4.0 - (0.25 - 1.0 / (2.0 * PI))).abs() < 1e-13
        );
    }

    #[test]
    fn normalized_j_signs() {
        let c = ChaosCoefficients::new(4).unwrap();
        let nj = c.normalized_j();
        assert!(nj[0] < 0.0 && nj[1] > 0.0 && nj[2] < 0.0);
        assert_relative_eq!(nj[0] * nj[0], c.weight(1), max_relative = 1e-15);
    }
}
