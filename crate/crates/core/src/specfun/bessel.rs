use std::f64::consts::PI;

use super::gamma_half;
use crate::{error::domain, Result};

/// Order `ν` of a Bessel function, restricted to integers and half-integers
/// (stored as `2ν`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselOrder {
    twice: i32,
}

impl BesselOrder {
    pub fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    /// `ν = d/2 - 1`, the order attached to `S^d`.
    pub fn for_sphere(d: u32) -> Self {
        Self {
            twice: d as i32 - 2,
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    fn lowered(self) -> Self {
        Self {
            twice: self.twice - 2,
        }
    }
}

// Below this argument the power series is used for every order.
const SERIES_LIMIT: f64 = 2.0;
// From here on the Hankel expansion is accurate to rounding for integer
// orders up to 5.
const HANKEL_LIMIT: f64 = 20.0;

/// `Σ_k (-x²/4)^k / (k! (ν+1)_k)`, i.e. `Γ(ν+1) (2/x)^ν J_ν(x)`.
fn scaled_series(nu: f64, x: f64) -> f64 {
    let z = -x * x / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..200 {
        let k = f64::from(k);
        term *= z / (k * (nu + k));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `Σ_{k≥1} ...` from [`scaled_series`] with the sign flipped: `1 - J̃`.
fn scaled_series_complement(nu: f64, x: f64) -> f64 {
    let z = -x * x / 4.0;
    let (mut term, mut sum) = (1.0, 0.0);
    for k in 1..200 {
        let k = f64::from(k);
        term *= z / (k * (nu + k));
        sum -= term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel's expansion. It terminates (and is exact) for half-integer `ν`.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let inv8x = 1.0 / (8.0 * x);
    let (mut p, mut q) = (1.0, 0.0);
    let mut term: f64 = 1.0;
    for k in 1..60u32 {
        let odd = f64::from(2 * k - 1);
        let next = term * (mu - odd * odd) * inv8x / f64::from(k);
        if next == 0.0 {
            break;
        }
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        // a_k enters P for even k and Q for odd k with alternating signs.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let phase = (nu / 2.0 + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Miller's backward recurrence for integer orders, normalized by
/// `J_0 + 2 Σ J_{2k} = 1`.
fn miller(n: usize, x: f64) -> f64 {
    let big = n.max(x as usize);
    let top = 2 * ((big + 20 + (40.0 * big as f64).sqrt() as usize) / 2);
    let (mut above, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut result = 0.0;
    for k in (1..=top).rev() {
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        let m = k - 1;
        if m == n {
            result = cur;
        }
        if m == 0 {
            norm += cur;
        } else if m % 2 == 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    result / norm
}

fn gamma_nu_plus_one(order: BesselOrder) -> f64 {
    // Γ(ν+1) = Γ((2ν+2)/2)
    gamma_half((order.twice + 2) as u32)
}

/// Bessel function of the first kind `J_ν(x)` for `x >= 0` and integer or
/// half-integer `ν >= -1`.
pub fn bessel_j(order: BesselOrder, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j needs x >= 0");
    if order.twice == -2 {
        return -bessel_j(BesselOrder::from_twice(2), x);
    }
    assert!(order.twice >= -1, "order below -1 is not supported");
    let nu = order.value();
    if x == 0.0 {
        return if order.twice == 0 {
            1.0
        } else if order.twice > 0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if order.twice == -1 {
        return hankel(nu, x);
    }
    if x < SERIES_LIMIT {
        return scaled_series(nu, x) * (x / 2.0).powf(nu) / gamma_nu_plus_one(order);
    }
    if !order.is_integer() || x >= HANKEL_LIMIT {
        return hankel(nu, x);
    }
    miller((order.twice / 2) as usize, x)
}

/// The scaled Bessel kernel `J̃_d(ψ) = Γ(ν+1) (2/ψ)^ν J_ν(ψ)` with
/// `ν = d/2 - 1`.
///
/// It is the `ℓ → ∞` limit of `G_{ℓ;d}(cos(ψ/ℓ))`, equals one at the
/// origin and decays like `ψ^{-(d-1)/2}`.
#[derive(Debug, Clone)]
pub struct ScaledBesselKernel {
    d: u32,
    order: BesselOrder,
    gamma_nu1: f64,
}

impl ScaledBesselKernel {
    pub fn new(d: u32) -> Result<Self> {
        if !(2..=12).contains(&d) {
            return domain(format!("scaled Bessel kernel needs 2 <= d <= 12, got {d}"));
        }
        let order = BesselOrder::for_sphere(d);
        Ok(Self {
            d,
            order,
            gamma_nu1: gamma_nu_plus_one(order),
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> BesselOrder {
        self.order
    }

    /// `J̃_d(ψ)`; even in `ψ`.
    pub fn eval(&self, psi: f64) -> f64 {
        let x = psi.abs();
        let nu = self.order.value();
        if x < SERIES_LIMIT {
            return scaled_series(nu, x);
        }
        self.gamma_nu1 * (2.0 / x).powf(nu) * bessel_j(self.order, x)
    }

    /// `1 - J̃_d(ψ)` without cancellation near the origin.
    pub fn one_minus(&self, psi: f64) -> f64 {
        let x = psi.abs();
        if x < SERIES_LIMIT {
            scaled_series_complement(self.order.value(), x)
        } else {
            1.0 - self.eval(x)
        }
    }

    /// First `count` positive zeros of `J_ν`, which are the zeros of `J̃_d`.
    pub fn zeros(&self, count: usize) -> Vec<f64> {
        let nu = self.order.value();
        let mu = 4.0 * nu * nu;
        let lower = self.order.lowered();
        let mut out: Vec<f64> = Vec::with_capacity(count);
        for k in 1..=count {
            // McMahon's expansion as the starting point.
            let beta = (k as f64 + nu / 2.0 - 0.25) * PI;
            let b8 = 8.0 * beta;
            let mut x =
                beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3));
            for _ in 0..50 {
                let j = bessel_j(self.order, x);
                let dj = bessel_j(lower, x) - nu / x * j;
                let step = j / dj;
                x -= step;
                if step.abs() < 4.0 * f64::EPSILON * x {
                    break;
                }
            }
            debug_assert!(out.last().is_none_or(|&p| x > p + 1.0));
            out.push(x);
        }
        out
    }

    /// A constant `c` with `|J̃_d(ψ)| <= c ψ^{-(d-1)/2}` for all `ψ >= 1`.
    pub fn envelope_constant(&self) -> f64 {
        let e = (f64::from(self.d) - 1.0) / 2.0;
        let mut best: f64 = 0.0;
        let far = 400.0;
        let steps = 80_000;
        for i in 0..=steps {
            let psi = 1.0 + (far - 1.0) * f64::from(i) / f64::from(steps);
            best = best.max(self.eval(psi).abs() * psi.powf(e));
        }
        // Beyond the scan the modulus of the Hankel pair bounds the kernel.
        let mu = 4.0 * self.order.value().powi(2);
        let tail = self.gamma_nu1
            * 2f64.powf(self.order.value())
            * (2.0 / PI).sqrt()
            * (1.0 + (mu - 1.0).abs() / (8.0 * far * far));
        best.max(tail) * (1.0 + 1e-6)
    }
}

/// `J̃_d(ψ)` for `ψ >= 0`; see [`ScaledBesselKernel`].
pub fn scaled_bessel(d: u32, psi: f64) -> Result<f64> {
    if !(psi >= 0.0) {
        return domain(format!("scaled Bessel kernel needs ψ >= 0, got {psi}"));
    }
    Ok(ScaledBesselKernel::new(d)?.eval(psi))
}
