use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use super::interval::weighted_rule;
use crate::numeric::pairwise_sum;
use crate::{error::domain, Error, Result};

/// Default cap on the number of points in a sphere grid.
pub const DEFAULT_POINT_BUDGET: usize = 4_000_000;

/// A product quadrature grid on `S^d ⊂ R^{d+1}`.
///
/// Points use hyperspherical coordinates
/// `x = (cos θ_1, sin θ_1 cos θ_2, …, sin θ_1 ⋯ sin θ_{d-1} sin φ)`.
/// Each polar factor is a symmetric rule in `t = cos θ_j` with weight
/// `(1-t²)^{(d-j-1)/2}`; the azimuth uses an even number of equispaced
/// nodes. The grid therefore maps onto itself under `x ↦ -x` with
/// coordinates negated exactly, and `antipode[i]` is the index of `-x_i`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    d: u32,
    coords: Vec<f64>,
    weights: Vec<f64>,
    antipode: Vec<usize>,
    exactness_degree: u64,
}

impl QuadratureGrid {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Spherical polynomials of degree `<= exactness_degree` integrate
    /// exactly (up to rounding).
    pub fn exactness_degree(&self) -> u64 {
        self.exactness_degree
    }

    pub fn antipodal_symmetric(&self) -> bool {
        true
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let k = self.d as usize + 1;
        &self.coords[i * k..(i + 1) * k]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d as usize + 1)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn antipode(&self) -> &[usize] {
        &self.antipode
    }

    /// `Σ w_i f(x_i)`, evaluated in parallel and summed pairwise in point
    /// order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let k = self.d as usize + 1;
        let terms: Vec<f64> = self
            .coords
            .par_chunks_exact(k)
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// Writes one row per point: `x_0, …, x_d, weight`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..=self.d).map(|i| format!("x{i}")).collect();
        writeln!(out, "{},weight", header.join(","))?;
        for (x, w) in self.points().zip(&self.weights) {
            for c in x {
                write!(out, "{c:.17e},")?;
            }
            writeln!(out, "{w:.17e}")?;
        }
        Ok(())
    }
}

/// A grid on `S^d` exact for polynomials of degree `<= degree`, within
/// [`DEFAULT_POINT_BUDGET`] points.
pub fn build_grid(d: u32, degree: u64) -> Result<QuadratureGrid> {
    build_grid_with_budget(d, degree, DEFAULT_POINT_BUDGET)
}

pub fn build_grid_with_budget(d: u32, degree: u64, budget: usize) -> Result<QuadratureGrid> {
    if d < 1 {
        return domain("sphere grids need d >= 1");
    }
    let azimuth = azimuth_count(degree);
    let mut polar = Vec::new();
    let mut needed = azimuth as u128;
    for k in 2..=d {
        let rule = weighted_rule(k - 2, degree)?;
        needed *= rule.len() as u128;
        polar.push(rule);
    }
    if needed > budget as u128 {
        return Err(Error::Budget {
            what: "sphere grid points",
            needed,
            limit: budget as u128,
        });
    }

    // S^1
    let m = azimuth;
    let mut coords = vec![0.0; 2 * m];
    for j in 0..m / 2 {
        let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
        coords[2 * j] = c;
        coords[2 * j + 1] = s;
        coords[2 * (j + m / 2)] = -c;
        coords[2 * (j + m / 2) + 1] = -s;
    }
    let mut weights = vec![2.0 * PI / m as f64; m];
    let mut antipode: Vec<usize> = (0..m).map(|j| (j + m / 2) % m).collect();

    // Lift S^{k-1} to S^k as x = (t, √(1-t²) ω); the last lift is θ_1.
    for (k, rule) in (2..=d).zip(polar.iter()) {
        let dim = k as usize + 1;
        let inner = weights.len();
        let n = rule.len();
        let mut c = Vec::with_capacity(n * inner * dim);
        let mut w = Vec::with_capacity(n * inner);
        let mut a = Vec::with_capacity(n * inner);
        for (i, (&t, &wt)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            let s = ((1.0 - t) * (1.0 + t)).sqrt();
            for p in 0..inner {
                c.push(t);
                c.extend(
                    coords[p * (dim - 1)..(p + 1) * (dim - 1)]
                        .iter()
                        .map(|v| s * v),
                );
                w.push(wt * weights[p]);
                a.push((n - 1 - i) * inner + antipode[p]);
            }
        }
        coords = c;
        weights = w;
        antipode = a;
    }
    Ok(QuadratureGrid {
        d,
        coords,
        weights,
        antipode,
        exactness_degree: degree,
    })
}

fn azimuth_count(degree: u64) -> usize {
    let m = (degree as usize + 1).max(2);
    m + m % 2
}

/// Geodesic distance `arccos⟨x, y⟩` between unit vectors, with the inner
/// product clamped to `[-1, 1]`.
pub fn geodesic(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return domain("geodesic: vectors of different dimension");
    }
    for v in [x, y] {
        let r: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (r - 1.0).abs() > 1e-10 {
            return domain(format!("geodesic: |x| = {r} is not a unit vector"));
        }
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(dot.clamp(-1.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma_half, sphere_surface};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    // ∫_{S^d} Π x_i^{2a_i} = 2 Π Γ(a_i + 1/2) / Γ(Σ a_i + (d+1)/2)
    fn even_monomial_integral(a: &[u32]) -> f64 {
        let num: f64 = a.iter().map(|&k| gamma_half(2 * k + 1)).product();
        let s: u32 = a.iter().sum();
        2.0 * num / gamma_half(2 * s + a.len() as u32)
    }

    #[test]
    fn total_weight_is_surface() {
        for d in 1..=5 {
            let g = build_grid(d, 6).unwrap();
            let total: f64 = g.weights().iter().sum();
            assert_abs_diff_eq!(total, sphere_surface(d), epsilon = 1e-12);
        }
    }

    #[test]
    fn monomials_integrate_exactly() {
        for d in 2..=4u32 {
            let g = build_grid(d, 8).unwrap();
            let cases: Vec<Vec<u32>> = vec![
                vec![4, 0, 0, 0, 0],
                vec![1, 1, 1, 1, 0],
                vec![0, 2, 0, 1, 1],
                vec![0, 0, 1, 3, 0],
                vec![2, 0, 2, 0, 0],
            ];
            for a in cases {
                let a = &a[..=d as usize];
                let got = g.integrate(|x| {
                    x.iter()
                        .zip(a)
                        .map(|(v, &k)| v.powi(2 * k as i32))
                        .product()
                });
                assert_abs_diff_eq!(got, even_monomial_integral(a), epsilon = 1e-12);
                // odd monomials vanish
                let odd = g.integrate(|x| x[0] * x[d as usize].powi(2 * a[0] as i32));
                assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn points_on_sphere_and_antipodes() {
        let g = build_grid(3, 9).unwrap();
        for i in 0..g.len() {
            let x = g.point(i);
            let r: f64 = x.iter().map(|v| v * v).sum();
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-14);
            let j = g.antipode()[i];
            assert_eq!(g.antipode()[j], i);
            assert_eq!(g.weights()[j], g.weights()[i]);
            for (a, b) in x.iter().zip(g.point(j)) {
                assert_eq!(*a, -*b);
            }
        }
    }

    #[test]
    fn geodesic_examples() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert_eq!(geodesic(&e1, &e1).unwrap(), 0.0);
        assert_eq!(geodesic(&e1, &[-1.0, 0.0, 0.0]).unwrap(), PI);
        assert_abs_diff_eq!(geodesic(&e1, &e2).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert!(geodesic(&e1, &[2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn budget_enforced() {
        let err = build_grid_with_budget(3, 200, 10_000).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn csv_export() {
        let g = build_grid(2, 2).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x0,x1,x2,weight");
        assert_eq!(lines.len(), g.len() + 1);
        assert_eq!(lines[1].split(',').count(), 4);
    }

    proptest! {
        #[test]
        fn geodesic_is_a_metric(a in proptest::collection::vec(-1.0f64..1.0, 9)) {
            let norm = |v: &[f64]| {
                let r = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
                v.iter().map(|x| x / r).collect::<Vec<f64>>()
            };
            let (x, y, z) = (norm(&a[0..3]), norm(&a[3..6]), norm(&a[6..9]));
            prop_assume!(a[0..3].iter().chain(&a[3..6]).chain(&a[6..9]).all(|v| v.abs() > 1e-3));
            let g = |u: &[f64], v: &[f64]| geodesic(u, v).unwrap();
            prop_assert!(g(&x, &x) < 1e-7);
            prop_assert_eq!(g(&x, &y), g(&y, &x));
            let dxy = g(&x, &y);
            prop_assert!((0.0..=PI).contains(&dxy));
            prop_assert!(g(&x, &z) <= dxy + g(&y, &z) + 1e-12);
        }
    }
}
