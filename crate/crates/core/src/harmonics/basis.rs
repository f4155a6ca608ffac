use std::f64::consts::PI;

use serde::Serialize;

use crate::specfun::{eigenspace_dim, sphere_surface, GegenbauerEvaluator};
use crate::spherequad::QuadratureGrid;
use crate::{error::domain, Error, Result};

/// Largest eigenspace dimension for which a basis is built.
pub const MAX_BASIS_SIZE: u64 = 20_000;

/// Classical label of a basis function.
///
/// `chain = [ℓ, j_1, …, j_{d-2}]` lists the degrees of the nested
/// harmonics on `S^d ⊃ S^{d-1} ⊃ … ⊃ S^2`; `m` is the azimuthal index on
/// `S^1` with `|m| <= j_{d-2}` (or `ℓ` when `d = 2`). Negative `m` selects
/// `sin(|m| φ)`, positive `m` selects `cos(m φ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarmonicLabel {
    pub chain: Vec<u32>,
    pub m: i32,
}

#[derive(Debug, Clone)]
struct Level {
    drop: u32,
    poly: GegenbauerEvaluator,
    amplitude: f64,
}

#[derive(Debug, Clone)]
struct Harmonic {
    levels: Vec<Level>,
    m: i32,
    circle_norm: f64,
}

/// An orthonormal real basis of the degree-`ℓ` eigenspace on `S^d`.
///
/// Functions are built recursively: on `S^k`, with `x = (y_0, y')` and
/// `ρ = |x|`,
///
/// `Y(x) = A ρ^{j-i} G_{j-i; 2i+k}(y_0 / ρ) Y'(y')`
///
/// where `Y'` is a degree-`i` solid harmonic on `R^k` and
/// `A = √(|S^{D-1}| n_{j-i;D} / |S^D|)`, `D = 2i + k`. On `S^1` the
/// factors are `1/√(2π)`, `Re (u+iv)^m / √π` and `Im (u+iv)^m / √π`.
/// For `d = 2` this is the usual real spherical harmonic basis without the
/// Condon–Shortley phase.
///
/// Flat index `m ∈ {1..n}` (0-based in this API) follows lexicographic
/// order of `(j_1, …, j_{d-2}, m)` with every component ascending; for
/// `d = 2` flat index `k` is `m = k - ℓ`, and for `d = 3` it runs over
/// `j = 0..=ℓ`, `m = -j..=j`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    d: u32,
    degree: u32,
    labels: Vec<HarmonicLabel>,
    harmonics: Vec<Harmonic>,
}

/// Builds the basis for `(d, ℓ)`.
pub fn build_basis(d: u32, l: u32) -> Result<HarmonicBasis> {
    if d < 2 {
        return domain(format!("harmonic bases need d >= 2, got {d}"));
    }
    let n = eigenspace_dim(d, l)?;
    if n > MAX_BASIS_SIZE {
        return Err(Error::Unsupported(format!(
            "basis for d = {d}, ℓ = {l} has {n} functions; the limit is {MAX_BASIS_SIZE}"
        )));
    }
    let mut labels = Vec::with_capacity(n as usize);
    let mut chain = vec![l];
    enumerate(d, &mut chain, &mut labels);
    debug_assert_eq!(labels.len() as u64, n);
    let harmonics = labels
        .iter()
        .map(|lab| make_harmonic(d, lab))
        .collect::<Result<Vec<_>>>()?;
    Ok(HarmonicBasis {
        d,
        degree: l,
        labels,
        harmonics,
    })
}

fn enumerate(d: u32, chain: &mut Vec<u32>, out: &mut Vec<HarmonicLabel>) {
    let last = *chain.last().unwrap();
    if chain.len() as u32 == d - 1 {
        let last = last as i32;
        for m in -last..=last {
            out.push(HarmonicLabel {
                chain: chain.clone(),
                m,
            });
        }
        return;
    }
    for j in 0..=last {
        chain.push(j);
        enumerate(d, chain, out);
        chain.pop();
    }
}

fn make_harmonic(d: u32, label: &HarmonicLabel) -> Result<Harmonic> {
    let mut levels = Vec::with_capacity(d as usize - 1);
    for (idx, k) in (2..=d).rev().enumerate() {
        let j = label.chain[idx];
        let i = label
            .chain
            .get(idx + 1)
            .copied()
            .unwrap_or(label.m.unsigned_abs());
        let big_d = 2 * i + k;
        let drop = j - i;
        let amplitude = (sphere_surface(big_d - 1) * eigenspace_dim(big_d, drop)? as f64
            / sphere_surface(big_d))
        .sqrt();
        levels.push(Level {
            drop,
            poly: GegenbauerEvaluator::new(big_d, drop)?,
            amplitude,
        });
    }
    let circle_norm = if label.m == 0 {
        1.0 / (2.0 * PI).sqrt()
    } else {
        1.0 / PI.sqrt()
    };
    Ok(Harmonic {
        levels,
        m: label.m,
        circle_norm,
    })
}

impl Harmonic {
    fn eval(&self, x: &[f64], suffix_norm: &[f64]) -> f64 {
        let mut value = self.circle_norm;
        for (idx, level) in self.levels.iter().enumerate() {
            let rho = suffix_norm[idx];
            if rho == 0.0 {
                if level.drop > 0 {
                    return 0.0;
                }
                value *= level.amplitude;
                continue;
            }
            let t = (x[idx] / rho).clamp(-1.0, 1.0);
            value *= level.amplitude * rho.powi(level.drop as i32) * level.poly.eval(t);
        }
        let off = self.levels.len();
        let (u, v) = (x[off], x[off + 1]);
        let k = self.m.unsigned_abs();
        if k == 0 {
            return value;
        }
        // (u + iv)^k by repeated multiplication
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..k {
            let r = re * u - im * v;
            im = re * v + im * u;
            re = r;
        }
        value * if self.m > 0 { re } else { im }
    }
}

impl HarmonicBasis {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[HarmonicLabel] {
        &self.labels
    }

    fn suffix_norms(&self, x: &[f64]) -> Vec<f64> {
        let levels = self.d as usize - 1;
        let mut out = vec![0.0; levels];
        let mut acc: f64 = x[levels..].iter().map(|v| v * v).sum();
        for idx in (0..levels).rev() {
            acc += x[idx] * x[idx];
            out[idx] = acc.sqrt();
        }
        out
    }

    /// `Y_m(x)` for flat index `m` (0-based).
    pub fn eval(&self, m: usize, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d as usize + 1);
        self.harmonics[m].eval(x, &self.suffix_norms(x))
    }

    /// All `n` basis functions at `x`.
    pub fn eval_all(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.d as usize + 1);
        let norms = self.suffix_norms(x);
        for (o, h) in out.iter_mut().zip(&self.harmonics) {
            *o = h.eval(x, &norms);
        }
    }

    /// Basis values at every grid point, point-major: entry `p * n + m`.
    pub fn sample_matrix(&self, grid: &QuadratureGrid) -> Result<Vec<f64>> {
        if grid.d() != self.d {
            return domain("grid and basis live on different spheres");
        }
        let n = self.len();
        let mut out = vec![0.0; grid.len() * n];
        for (row, x) in out.chunks_exact_mut(n).zip(grid.points()) {
            self.eval_all(x, row);
        }
        Ok(out)
    }
}
