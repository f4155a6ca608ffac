use statrs::distribution::{ContinuousCDF, Normal};

use crate::numeric::pairwise_sum;

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, pairwise_sum(&sq) / (n - 1.0))
}

/// `(1/N) Σ_i |x_(i) - Φ^{-1}((i - 1/2)/N)|`, the quantile form of the
/// Wasserstein-1 distance to `N(0, 1)` on the midpoint grid.
pub fn wasserstein1_empirical(samples: &[f64]) -> f64 {
    assert!(samples.len() >= 2, "need at least two samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let normal = standard_normal();
    let terms: Vec<f64> = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (x - normal.inverse_cdf((i as f64 + 0.5) / n)).abs())
        .collect();
    pairwise_sum(&terms) / n
}

/// `∫_0^1 |F_a^{-1}(u) - F_b^{-1}(u)| du` between two empirical laws.
pub fn wasserstein1_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "need non-empty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    // merge the breakpoints i/na and j/nb using integer cross-multiplication
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0u128;
    let total = (na as u128) * (nb as u128);
    let mut terms = Vec::with_capacity(na + nb);
    while i < na && j < nb {
        let next_a = (i as u128 + 1) * nb as u128;
        let next_b = (j as u128 + 1) * na as u128;
        let next = next_a.min(next_b);
        terms.push((next - prev) as f64 / total as f64 * (a[i] - b[j]).abs());
        prev = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    pairwise_sum(&terms)
}

/// `sup_x |F_N(x) - Φ(x)|`.
pub fn ks_statistic(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "need samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let normal = standard_normal();
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn quantiles(n: usize) -> Vec<f64> {
        let normal = standard_normal();
        (0..n)
            .map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64))
            .collect()
    }

    #[test]
    fn exact_quantiles() {
        assert!(wasserstein1_empirical(&quantiles(10_000)) < 1e-12);
    }

    #[test]
    fn location_shift() {
        let q = quantiles(5000);
        let delta = 0.3;
        let shifted: Vec<f64> = q.iter().map(|x| x + delta).collect();
        assert!((wasserstein1_empirical(&shifted) - delta).abs() < 1e-12);
        assert!((wasserstein1_two_sample(&shifted, &q) - delta).abs() < 1e-12);
    }

    #[test]
    fn two_sample_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<f64> = (0..300).map(|_| rng.sample(StandardNormal)).collect();
        let b: Vec<f64> = (0..170).map(|_| rng.sample(StandardNormal)).collect();
        assert_eq!(wasserstein1_two_sample(&a, &a), 0.0);
        let ab = wasserstein1_two_sample(&a, &b);
        assert!((ab - wasserstein1_two_sample(&b, &a)).abs() < 1e-14);
        // duplicating every sample leaves the law unchanged
        let doubled: Vec<f64> = a.iter().chain(&a).copied().collect();
        assert!(wasserstein1_two_sample(&doubled, &a) < 1e-15);
        // two points: |F^{-1}| difference over halves
        assert!((wasserstein1_two_sample(&[0.0, 1.0], &[0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn normal_draws_are_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
        assert!(wasserstein1_empirical(&x) < 0.03);
        let ks = ks_statistic(&x);
        assert!(ks > 0.0 && ks < 1.36 / (x.len() as f64).sqrt() * 1.5);
        let (m, v) = mean_and_variance(&x);
        assert!(m.abs() < 0.03 && (v - 1.0).abs() < 0.05);
    }

    #[test]
    fn ks_bounds() {
        assert!((ks_statistic(&[100.0]) - 1.0).abs() < 1e-12);
        assert!((ks_statistic(&[0.0]) - 0.5).abs() < 1e-15);
    }
}
