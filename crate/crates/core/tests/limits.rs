//! Large-ℓ limits that link the Gegenbauer moments, the Bessel kernel and
//! the chaos coefficients.

use hyperdefect::chaos::{c3_closed_form, c_coefficient};
use hyperdefect::harmonics::cum4_ratio;
use hyperdefect::specfun::sphere_surface;
use hyperdefect::spherequad::{gegenbauer_moment, MomentRange};

#[test]
fn scaled_cubic_moment_approaches_c3() {
    let c3 = c3_closed_form(2).unwrap();
    let scaled =
        |l: u32| f64::from(l).powi(2) * gegenbauer_moment(2, l, 3, MomentRange::Half).unwrap();
    let values: Vec<f64> = [50u32, 100, 200, 400].iter().map(|&l| scaled(l)).collect();
    for w in values.windows(2) {
        assert!((w[1] - c3).abs() < (w[0] - c3).abs());
    }
    assert!((values[3] / c3 - 1.0).abs() < 0.02);
}

#[test]
fn cum4_denominator_limit() {
    // the full θ range doubles the half-range limit
    let c3 = c3_closed_form(2).unwrap();
    let limit = 2.0 * 6.0 * sphere_surface(2) * sphere_surface(1) * c3;
    let l = 400u32;
    let r = cum4_ratio(2, l).unwrap();
    let scaled = r.denominator.sqrt() * f64::from(l).powi(2);
    assert!((scaled / limit - 1.0).abs() < 0.02, "{scaled} vs {limit}");
}

#[test]
fn coefficient_decay_follows_gaussian_envelope() {
    // J̃(ψ) ≈ exp(-ψ²/(2d)) near the origin, so c_{n+2}/c_n ≈ (n/(n+2))^{d/2}
    for d in 2..=5u32 {
        let c: Vec<f64> = (1..=7)
            .map(|q| c_coefficient(d, q).unwrap().value)
            .collect();
        for q in 1..=6usize {
            let n = (2 * q + 1) as f64;
            let envelope = (n / (n + 2.0)).powf(f64::from(d) / 2.0);
            let ratio = c[q] / c[q - 1] / envelope;
            assert!((0.5..=2.0).contains(&ratio), "d={d} q={q}: {ratio}");
        }
        let positive = c.iter().filter(|&&v| v > 0.0).count();
        println!("d={d}: {positive}/7 coefficients positive");
    }
}
