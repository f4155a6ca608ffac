use super::DOMAIN_SLACK;
use crate::{error::domain, Result};

/// Normalized Gegenbauer polynomials `G_{n;d}(t)` with `G_{n;d}(1) = 1`.
///
/// These are the zonal spherical harmonics on `S^d`, normalized so that
/// `G_{ℓ;d}(⟨x, y⟩)` is the covariance of the unit-variance random
/// eigenfunction. For `d = 2` they are the Legendre polynomials.
///
/// The three-term recurrence
/// `(n+d-1) G_{n+1} = (2n+d-1) t G_n - n G_{n-1}`
/// keeps every iterate bounded by one on `[-1, 1]` and is stable in the
/// forward direction. Because the recurrence only multiplies by `t` and
/// subtracts, `G_n(-t) = (-1)^n G_n(t)` holds exactly in floating point.
#[derive(Debug, Clone)]
pub struct GegenbauerEvaluator {
    d: u32,
    degree: u32,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl GegenbauerEvaluator {
    pub fn new(d: u32, degree: u32) -> Result<Self> {
        if d < 2 {
            return domain(format!("sphere dimension d = {d} must be >= 2"));
        }
        let dd = f64::from(d);
        let (alpha, beta) = (1..degree)
            .map(|n| {
                let n = f64::from(n);
                let den = n + dd - 1.0;
                ((2.0 * n + dd - 1.0) / den, n / den)
            })
            .unzip();
        Ok(Self {
            d,
            degree,
            alpha,
            beta,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `G_{degree;d}(t)` without domain checks.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if self.degree == 0 {
            return 1.0;
        }
        let (mut prev, mut cur) = (1.0, t);
        for (a, b) in self.alpha.iter().zip(&self.beta) {
            let next = a * t * cur - b * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `G_{degree;d}(t)`, rejecting `|t| > 1` beyond rounding slack.
    pub fn eval_checked(&self, t: f64) -> Result<f64> {
        check_unit(t)?;
        Ok(self.eval(t.clamp(-1.0, 1.0)))
    }

    /// Fills `out[n] = G_{n;d}(t)` for `n = 0..=degree`.
    pub fn eval_all(&self, t: f64, out: &mut [f64]) {
        assert!(out.len() > self.degree as usize);
        out[0] = 1.0;
        if self.degree == 0 {
            return;
        }
        out[1] = t;
        for (n, (a, b)) in self.alpha.iter().zip(&self.beta).enumerate() {
            out[n + 2] = a * t * out[n + 1] - b * out[n];
        }
    }
}

pub(crate) fn check_unit(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0 + DOMAIN_SLACK) {
        return domain(format!("argument t = {t} outside [-1, 1]"));
    }
    Ok(())
}

/// `G_{ℓ;d}(t)`; see [`GegenbauerEvaluator`].
pub fn gegenbauer(d: u32, l: u32, t: f64) -> Result<f64> {
    GegenbauerEvaluator::new(d, l)?.eval_checked(t)
}
