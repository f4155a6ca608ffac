use std::f64::consts::PI;

use super::ln_gamma;
use crate::{error::domain, Result};

/// Largest Hermite order supported.
pub const MAX_HERMITE_ORDER: usize = 200;

/// Probabilists' Hermite polynomials `H_0, …, H_K`.
///
/// Coefficients are stored in the monomial basis (`coefficients(k)[j]` is
/// the coefficient of `t^j`); evaluation uses the recurrence
/// `H_{k+1} = t H_k - k H_{k-1}`, which is better conditioned than the
/// monomial form.
#[derive(Debug, Clone)]
pub struct HermiteSequence {
    coeffs: Vec<Vec<f64>>,
}

impl HermiteSequence {
    pub fn new(max_order: usize) -> Result<Self> {
        if max_order > MAX_HERMITE_ORDER {
            return domain(format!(
                "Hermite order {max_order} exceeds {MAX_HERMITE_ORDER}"
            ));
        }
        let mut coeffs: Vec<Vec<f64>> = vec![vec![1.0]];
        for k in 0..max_order {
            let mut next = vec![0.0; k + 2];
            for (j, c) in coeffs[k].iter().enumerate() {
                next[j + 1] += c;
            }
            if k > 0 {
                for (j, c) in coeffs[k - 1].iter().enumerate() {
                    next[j] -= k as f64 * c;
                }
            }
            coeffs.push(next);
        }
        Ok(Self { coeffs })
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self, k: usize) -> &[f64] {
        &self.coeffs[k]
    }

    /// `H_0(t), …, H_K(t)`.
    pub fn values(&self, t: f64) -> Vec<f64> {
        let k = self.max_order();
        let mut out = Vec::with_capacity(k + 1);
        out.push(1.0);
        if k >= 1 {
            out.push(t);
        }
        for n in 1..k {
            out.push(t * out[n] - n as f64 * out[n - 1]);
        }
        out
    }
}

/// `H_k(t)` for `k <= 200`.
pub fn hermite(k: usize, t: f64) -> Result<f64> {
    if k > MAX_HERMITE_ORDER {
        return domain(format!("Hermite order {k} exceeds {MAX_HERMITE_ORDER}"));
    }
    let (mut prev, mut cur) = (1.0, t);
    if k == 0 {
        return Ok(1.0);
    }
    for n in 1..k {
        let next = t * cur - n as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `ln (2q-1)!!` with `(-1)!! = 1`.
pub fn ln_double_factorial_odd(q: u64) -> f64 {
    if q <= 85 {
        return double_factorial_odd(q).ln();
    }
    if q <= 4096 {
        return double_factorial_odd(85).ln()
            + (86..=q).map(|j| ((2 * j - 1) as f64).ln()).sum::<f64>();
    }
    // (2q-1)!! = 2^q Γ(q+1/2) / √π
    let q = q as f64;
    q * std::f64::consts::LN_2 + ln_gamma(q + 0.5) - 0.5 * PI.ln()
}

/// `(2q-1)!!`; overflows to infinity past `q = 150`.
pub fn double_factorial_odd(q: u64) -> f64 {
    if q > 160 {
        return f64::INFINITY;
    }
    (1..=q).fold(1.0, |acc, j| acc * (2 * j - 1) as f64)
}

/// `H_k(0)`: zero for odd `k`, `(-1)^{k/2} (k-1)!!` for even `k`.
pub fn hermite_at_zero(k: u64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let q = k / 2;
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    sign * double_factorial_odd(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_orders() {
        let h = HermiteSequence::new(4).unwrap();
        assert_eq!(h.coefficients(0), &[1.0]);
        assert_eq!(h.coefficients(1), &[0.0, 1.0]);
        assert_eq!(h.coefficients(2), &[-1.0, 0.0, 1.0]);
        assert_eq!(h.coefficients(3), &[0.0, -3.0, 0.0, 1.0]);
        assert_eq!(h.coefficients(4), &[3.0, 0.0, -6.0, 0.0, 1.0]);
        assert_eq!(h.values(2.0), vec![1.0, 2.0, 3.0, 2.0, -5.0]);
    }

    #[test]
    fn order_limit() {
        assert!(HermiteSequence::new(201).is_err());
        assert!(hermite(201, 0.0).is_err());
        assert!(hermite(200, 0.3).is_ok());
    }

    #[test]
    fn values_at_zero() {
        for k in 0..=200u64 {
            let direct = hermite(k as usize, 0.0).unwrap();
            let closed = hermite_at_zero(k);
            if direct.is_finite() && closed.is_finite() {
                assert_relative_eq!(direct, closed, max_relative = 1e-13);
            }
        }
        assert_eq!(hermite_at_zero(6), -15.0);
    }

    #[test]
    fn double_factorial_log_branch() {
        for q in [80u64, 85, 86, 90, 120, 5000] {
            let direct: f64 = (1..=q).map(|j| ((2 * j - 1) as f64).ln()).sum();
            assert_relative_eq!(ln_double_factorial_odd(q), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn orthogonality_under_gaussian() {
        // E[H_j H_k] = k! δ_jk, by Gauss–Hermite-free trapezoid on a wide grid.
        let h = HermiteSequence::new(6).unwrap();
        let n = 4000;
        let step = 24.0 / n as f64;
        let mut gram = [[0.0f64; 7]; 7];
        for i in 0..=n {
            let t = -12.0 + i as f64 * step;
            let w = step * (-t * t / 2.0).exp() / (2.0 * PI).sqrt();
            let v = h.values(t);
            for a in 0..7 {
                for b in 0..7 {
                    gram[a][b] += w * v[a] * v[b];
                }
            }
        }
        let mut fact = 1.0;
        for a in 0..7 {
            if a > 0 {
                fact *= a as f64;
            }
            for b in 0..7 {
                let want = if a == b { fact } else { 0.0 };
                assert!((gram[a][b] - want).abs() < 1e-9, "{a} {b} {}", gram[a][b]);
            }
        }
    }
}
