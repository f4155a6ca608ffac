use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{num_complex::Complex, FftPlanner};

use crate::numeric::pairwise_sum;
use crate::{Error, Result};

/// Largest polynomial degree an interval rule may be asked to integrate.
pub const MAX_RULE_DEGREE: u64 = 8_000_000;

// Gauss–Legendre up to this many nodes; Clenshaw–Curtis beyond.
const GAUSS_NODE_LIMIT: usize = 512;

/// A quadrature rule on an interval.
///
/// Nodes are sorted ascending. Rules on `[-1, 1]` built here are exactly
/// symmetric: `nodes[n-1-i] == -nodes[i]` and `weights[n-1-i] == weights[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly (against the rule's
    /// built-in weight function, if any).
    pub exactness_degree: u64,
}

impl IntervalRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// The same rule transported affinely from `[-1, 1]` to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> IntervalRule {
        let half = (b - a) / 2.0;
        let mid = (a + b) / 2.0;
        IntervalRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
            exactness_degree: self.exactness_degree,
        }
    }

    fn from_half(
        lower: Vec<(f64, f64)>,
        middle: Option<f64>,
        exactness_degree: u64,
    ) -> IntervalRule {
        // `lower` holds the strictly negative nodes in ascending order.
        let mut nodes: Vec<f64> = lower.iter().map(|p| p.0).collect();
        let mut weights: Vec<f64> = lower.iter().map(|p| p.1).collect();
        if let Some(w) = middle {
            nodes.push(0.0);
            weights.push(w);
        }
        for &(x, w) in lower.iter().rev() {
            nodes.push(-x);
            weights.push(w);
        }
        IntervalRule {
            nodes,
            weights,
            exactness_degree,
        }
    }
}

fn gl_cache() -> &'static Mutex<HashMap<usize, Arc<IntervalRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<IntervalRule>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `n`-point Gauss–Legendre rule (exact to degree `2n - 1`).
pub fn gauss_legendre(n: usize) -> Result<Arc<IntervalRule>> {
    if n == 0 {
        return Err(Error::Domain(
            "Gauss–Legendre needs at least one node".into(),
        ));
    }
    if let Some(r) = gl_cache().lock().unwrap().get(&n) {
        return Ok(r.clone());
    }
    let mut lower = Vec::with_capacity(n / 2);
    for k in 1..=n / 2 {
        // Largest positive root first; negated, these ascend from -1.
        let mut x = (PI * (k as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for iter in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                // one polishing step once converged
                let (p, d) = legendre_and_derivative(n, x);
                x -= p / d;
                dp = d;
                break;
            }
            assert!(iter < 99, "Gauss–Legendre Newton iteration stalled");
        }
        lower.push((-x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    let middle = if n % 2 == 1 {
        let (_, d) = legendre_and_derivative(n, 0.0);
        Some(2.0 / (d * d))
    } else {
        None
    };
    let rule = Arc::new(IntervalRule::from_half(lower, middle, 2 * n as u64 - 1));
    gl_cache().lock().unwrap().insert(n, rule.clone());
    Ok(rule)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 1..n {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Clenshaw–Curtis rule with `n + 1` Chebyshev extreme points, exact to
/// degree `n` (`n` is rounded up to an even number). Weights come from an
/// inverse FFT in `O(n log n)`.
pub fn clenshaw_curtis(n: usize) -> IntervalRule {
    let n = (n.max(2) + 1) & !1;
    let nf = n as f64;
    let l = n / 2;
    // Waldvogel's construction.
    let mut v0 = vec![0.0; n + 1];
    for (i, v) in v0.iter_mut().take(l).enumerate() {
        let odd = (2 * i + 1) as f64;
        *v = 2.0 / odd / (odd - 2.0);
    }
    v0[l] = 1.0 / (nf - 1.0);
    let mut data: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::new(-v0[k] - v0[n - k], 0.0))
        .collect();
    let g = 1.0 / (nf * nf - 1.0);
    for (k, c) in data.iter_mut().enumerate() {
        let mut g0 = -1.0;
        if k == l {
            g0 += 2.0 * nf;
        }
        c.re += g0 * g;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut data);
    let w: Vec<f64> = data.iter().map(|c| c.re / nf).collect();
    // w[j] belongs to cos(jπ/n); w[n] = w[0].
    let lower: Vec<(f64, f64)> = (0..l)
        .map(|j| (-(j as f64 * PI / nf).cos(), 0.5 * (w[j] + w[(n - j) % n])))
        .collect();
    IntervalRule::from_half(lower, Some(w[l]), n as u64)
}

/// `n`-point Gauss–Chebyshev rule of the first kind for
/// `∫ f(t) (1-t²)^{-1/2} dt`, exact to degree `2n - 1`.
pub fn gauss_chebyshev(n: usize) -> IntervalRule {
    assert!(n > 0);
    let w = PI / n as f64;
    let lower: Vec<(f64, f64)> = (1..=n / 2)
        .map(|k| (-((2 * k - 1) as f64 * PI / (2 * n) as f64).cos(), w))
        .collect();
    let middle = (n % 2 == 1).then_some(w);
    IntervalRule::from_half(lower, middle, 2 * n as u64 - 1)
}

fn check_degree(degree: u64) -> Result<()> {
    if degree > MAX_RULE_DEGREE {
        return Err(Error::Budget {
            what: "quadrature degree",
            needed: u128::from(degree),
            limit: u128::from(MAX_RULE_DEGREE),
        });
    }
    Ok(())
}

/// A rule on `[-1, 1]` exact for polynomials of degree `<= degree`.
pub fn legendre_exact(degree: u64) -> Result<IntervalRule> {
    check_degree(degree)?;
    let n = (degree as usize + 1).div_ceil(2);
    if n <= GAUSS_NODE_LIMIT {
        let mut r = (*gauss_legendre(n)?).clone();
        r.exactness_degree = 2 * n as u64 - 1;
        Ok(r)
    } else {
        Ok(clenshaw_curtis(degree as usize))
    }
}

/// A symmetric rule exact for `∫_{-1}^{1} p(t) (1-t²)^{e/2} dt` with `e =
/// twice_exponent` and `deg p <= degree`.
///
/// Even `e` folds the polynomial weight into a Legendre-exact rule; odd
/// `e` folds `(1-t²)^{(e+1)/2}` into Gauss–Chebyshev.
pub fn weighted_rule(twice_exponent: u32, degree: u64) -> Result<IntervalRule> {
    let m = i32::try_from(twice_exponent.div_ceil(2)).unwrap();
    let total = degree + 2 * m as u64;
    check_degree(total)?;
    let mut rule = if twice_exponent % 2 == 0 {
        legendre_exact(total)?
    } else {
        gauss_chebyshev((total as usize + 1).div_ceil(2))
    };
    if m > 0 {
        for (w, &x) in rule.weights.iter_mut().zip(&rule.nodes) {
            *w *= ((1.0 - x) * (1.0 + x)).powi(m);
        }
    }
    rule.exactness_degree = degree;
    Ok(rule)
}
