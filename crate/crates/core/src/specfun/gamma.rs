use std::f64::consts::PI;

use crate::{error::domain, Error, Result};

/// `Γ(n / 2)` for a positive integer `n`, by exact recurrence from
/// `Γ(1) = 1` or `Γ(1/2) = √π`.
pub fn gamma_half(n: u32) -> f64 {
    assert!(n > 0, "gamma_half(0) is a pole");
    let (mut g, mut x) = if n % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = f64::from(n) / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Surface area `|S^d| = 2 π^{(d+1)/2} / Γ((d+1)/2)`.
pub fn sphere_surface(d: u32) -> f64 {
    2.0 * PI.powf(f64::from(d + 1) / 2.0) / gamma_half(d + 1)
}

/// Asymptotic coefficients of `√x Γ(x+1/2)/Γ(x+1)` in powers of `1/x`.
const RATIO_SERIES: [f64; 7] = [
    1.0,
    -1.0 / 8.0,
    1.0 / 128.0,
    5.0 / 1024.0,
    -21.0 / 32768.0,
    -399.0 / 262144.0,
    869.0 / 4194304.0,
];

/// `Γ(x + 1/2) / Γ(x + 1)` for `x >= 0`.
pub fn gamma_ratio_half(x: f64) -> f64 {
    assert!(x >= 0.0);
    // Shift upward until the asymptotic series is accurate to rounding.
    let mut shift = 1.0;
    let mut y = x;
    while y < 40.0 {
        shift *= (y + 1.0) / (y + 0.5);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let mut s = 0.0;
    for c in RATIO_SERIES.iter().rev() {
        s = s * inv + c;
    }
    s / y.sqrt() * shift
}

/// Dimension `n_{ℓ;d}` of the degree-`ℓ` eigenspace on `S^d`.
///
/// Computed as `(2ℓ+d-1) (ℓ+d-2)! / (ℓ! (d-1)!)` in checked integer
/// arithmetic; overflow is reported instead of wrapping.
pub fn eigenspace_dim(d: u32, l: u32) -> Result<u64> {
    if d < 2 {
        return domain(format!("sphere dimension d = {d} must be >= 2"));
    }
    if l == 0 {
        return Ok(1);
    }
    // binom(ℓ+d-2, ℓ-1) built incrementally stays integral at every step.
    let (l, d) = (u128::from(l), u128::from(d));
    let mut binom: u128 = 1;
    for i in 1..=(d - 1) {
        binom = binom
            .checked_mul(l - 1 + i)
            .ok_or(Error::Overflow("eigenspace dimension"))?
            / i;
    }
    // binom = C(ℓ+d-2, d-1) = C(ℓ+d-2, ℓ-1)
    let n = (2 * l + d - 1)
        .checked_mul(binom)
        .ok_or(Error::Overflow("eigenspace dimension"))?
        / l;
    u64::try_from(n).map_err(|_| Error::Overflow("eigenspace dimension"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_gamma() {
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(8), 6.0);
        assert_relative_eq!(gamma_half(1), PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half(5), 0.75 * PI.sqrt(), max_relative = 1e-15);
        for n in 1..60 {
            assert_relative_eq!(
                gamma_half(n).ln(),
                ln_gamma(f64::from(n) / 2.0),
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn surfaces() {
        assert_relative_eq!(sphere_surface(1), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_surface(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_surface(3), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_surface(4), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn dims() {
        for l in 0..50u32 {
            assert_eq!(eigenspace_dim(2, l).unwrap(), u64::from(2 * l + 1));
            assert_eq!(eigenspace_dim(3, l).unwrap(), u64::from((l + 1) * (l + 1)));
        }
        assert_eq!(eigenspace_dim(4, 2).unwrap(), 14);
        for d in 2..=6u32 {
            let l = 1000.0f64;
            let fact: f64 = (1..d).map(f64::from).product();
            let asym = 2.0 * l.powi(d as i32 - 1) / fact;
            let n = eigenspace_dim(d, 1000).unwrap() as f64;
            assert!((n / asym - 1.0).abs() < 0.02, "d = {d}");
        }
        assert!(eigenspace_dim(1, 3).is_err());
        assert_eq!(
            eigenspace_dim(60, 200_000).unwrap_err(),
            Error::Overflow("eigenspace dimension")
        );
    }

    #[test]
    fn ratio_against_lgamma() {
        for &x in &[0.0, 0.5, 1.0, 3.0, 17.5, 39.9, 40.0, 1e3] {
            let want = (ln_gamma(x + 0.5) - ln_gamma(x + 1.0)).exp();
            assert_relative_eq!(gamma_ratio_half(x), want, max_relative = 1e-12);
        }
        assert_relative_eq!(gamma_ratio_half(0.0), PI.sqrt(), max_relative = 1e-14);
        let x: f64 = 1e6;
        let want = (1.0 - 1.0 / (8.0 * x) + 1.0 / (128.0 * x * x)) / x.sqrt();
        assert_relative_eq!(gamma_ratio_half(x), want, max_relative = 1e-15);
    }
}
