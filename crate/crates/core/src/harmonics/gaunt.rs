use std::io::{BufRead, Write};

use serde::Serialize;

use super::basis::build_basis;
use crate::specfun::{eigenspace_dim, sphere_surface};
use crate::spherequad::{build_grid, cubic_integral};
use crate::{error::domain, Error, Result};

/// Cap on `(n³/6) · grid points`, the multiply-add count of a table fill.
pub const GAUNT_WORK_BUDGET: u128 = 40_000_000_000;

const ZERO_SNAP: f64 = 1e-12;

/// Triple-product integrals `𝒢(a, b, c) = ∫ Y_a Y_b Y_c` of one basis.
///
/// Only sorted triples `a <= b <= c` are stored; [`GauntTable::get`]
/// accepts any order. Entries with magnitude below `1e-12` are stored as
/// exact zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct GauntTable {
    d: u32,
    l: u32,
    n: usize,
    exactness: u64,
    values: Vec<f64>,
    offsets: Vec<usize>,
}

fn first_offsets(n: usize) -> Vec<usize> {
    // Number of sorted triples whose first index is below a.
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0;
    for a in 0..=n {
        out.push(acc);
        if a < n {
            let m = n - a;
            acc += m * (m + 1) / 2;
        }
    }
    out
}

impl GauntTable {
    fn empty(d: u32, l: u32, n: usize, exactness: u64) -> Self {
        let offsets = first_offsets(n);
        let total = offsets[n];
        Self {
            d,
            l,
            n,
            exactness,
            values: vec![0.0; total],
            offsets,
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Polynomial exactness of the quadrature that filled the table.
    pub fn exactness(&self) -> u64 {
        self.exactness
    }

    fn index(&self, a: usize, b: usize, c: usize) -> usize {
        debug_assert!(a <= b && b <= c && c < self.n);
        // pairs (b', c') with a <= b' < b, b' <= c' < n
        let before = if b > a {
            (b - a) * self.n - (a + b - 1) * (b - a) / 2
        } else {
            0
        };
        self.offsets[a] + before + (c - b)
    }

    /// `𝒢(a, b, c)` for 0-based flat indices in any order.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        let mut t = [a, b, c];
        t.sort_unstable();
        self.values[self.index(t[0], t[1], t[2])]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let i = self.index(a, b, c);
        self.values[i] = v;
    }

    /// Nonzero sorted triples `(a, b, c, value)`.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a..self.n {
                for c in b..self.n {
                    let v = self.get(a, b, c);
                    if v != 0.0 {
                        out.push((a, b, c, v));
                    }
                }
            }
        }
        out
    }

    /// Full `n × n × n` array, entry `(a·n + b)·n + c`.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for (a, b, c, v) in self.nonzero() {
            for (x, y, z) in [
                (a, b, c),
                (a, c, b),
                (b, a, c),
                (b, c, a),
                (c, a, b),
                (c, b, a),
            ] {
                out[(x * n + y) * n + z] = v;
            }
        }
        out
    }

    /// Text form: a header `d ℓ n exactness`, then one `m1 m2 m3 value`
    /// row per nonzero sorted triple, with 1-based indices. Missing triples
    /// are zero.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {} {} {}", self.d, self.l, self.n, self.exactness)?;
        for (a, b, c, v) in self.nonzero() {
            writeln!(out, "{} {} {} {:.16e}", a + 1, b + 1, c + 1, v)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let parse_err = |line: usize, msg: &str| Error::Parse(format!("line {line}: {msg}"));
        // `#` lines are comments
        let mut lines = input
            .lines()
            .enumerate()
            .filter(|(_, l)| !matches!(l, Ok(s) if s.trim_start().starts_with('#')));
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let header = header.map_err(|e| Error::Parse(e.to_string()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 {
            return Err(parse_err(1, "header must be `d ℓ n exactness`"));
        }
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| parse_err(1, "bad header field"))
        };
        let (d, l, n, exactness) = (
            num(h[0])? as u32,
            num(h[1])? as u32,
            num(h[2])? as usize,
            num(h[3])?,
        );
        if eigenspace_dim(d, l)? != n as u64 {
            return Err(parse_err(1, "n does not match the eigenspace dimension"));
        }
        let mut table = Self::empty(d, l, n, exactness);
        for (i, line) in lines {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.is_empty() {
                continue;
            }
            if f.len() != 4 {
                return Err(parse_err(i + 1, "expected `m1 m2 m3 value`"));
            }
            let idx = |s: &str| -> Result<usize> {
                let m = s
                    .parse::<usize>()
                    .map_err(|_| parse_err(i + 1, "bad index"))?;
                if m == 0 || m > n {
                    return Err(parse_err(i + 1, "index out of range"));
                }
                Ok(m - 1)
            };
            let (a, b, c) = (idx(f[0])?, idx(f[1])?, idx(f[2])?);
            if !(a <= b && b <= c) {
                return Err(parse_err(i + 1, "indices must be sorted"));
            }
            let v = f[3]
                .parse::<f64>()
                .map_err(|_| parse_err(i + 1, "bad value"))?;
            table.set(a, b, c, v);
        }
        Ok(table)
    }
}

/// Fills the Gaunt table of `(d, ℓ)` by quadrature of exactness `3ℓ`.
pub fn gaunt_table(d: u32, l: u32) -> Result<GauntTable> {
    let basis = build_basis(d, l)?;
    let n = basis.len();
    let exactness = 3 * u64::from(l);
    let mut table = GauntTable::empty(d, l, n, exactness);
    if l % 2 == 1 {
        return Ok(table);
    }
    let grid = build_grid(d, exactness)?;
    let work = (n as u128).pow(3) / 6 * grid.len() as u128;
    if work > GAUNT_WORK_BUDGET {
        return Err(Error::Budget {
            what: "Gaunt table multiply-adds",
            needed: work,
            limit: GAUNT_WORK_BUDGET,
        });
    }
    let b = basis.sample_matrix(&grid)?;
    let weights = grid.weights();
    let mut acc = vec![0.0; n];
    for a in 0..n {
        for bb in a..n {
            acc[bb..].iter_mut().for_each(|v| *v = 0.0);
            for (p, &w) in weights.iter().enumerate() {
                let row = &b[p * n..(p + 1) * n];
                let f = w * row[a] * row[bb];
                for (s, &y) in acc[bb..].iter_mut().zip(&row[bb..]) {
                    *s += f * y;
                }
            }
            for c in bb..n {
                let v = if acc[c].abs() < ZERO_SNAP {
                    0.0
                } else {
                    acc[c]
                };
                table.set(a, bb, c, v);
            }
        }
    }
    Ok(table)
}

/// Residuals of the double-sum identity for one Gaunt table.
#[derive(Debug, Clone, Serialize)]
pub struct LemcgResiduals {
    pub d: u32,
    pub l: u32,
    pub n: usize,
    /// `(n²/|S^d|)(|S^{d-1}|/|S^d|) ∫ G³ (1-t²)^{(d-2)/2} dt`
    pub g: f64,
    /// Row-major `n × n`: `Σ_{m1,m2} 𝒢(m1,m2,M) 𝒢(m1,m2,M') - δ g`.
    pub residuals: Vec<f64>,
    pub max_offdiag: f64,
    pub max_diag_rel: f64,
}

/// `g_{ℓ;d}` from the cubic Gegenbauer integral.
pub(crate) fn g_value(d: u32, l: u32) -> Result<f64> {
    let n = eigenspace_dim(d, l)? as f64;
    let s = sphere_surface(d);
    Ok(n * n / s * (sphere_surface(d - 1) / s) * cubic_integral(d, l)?)
}

/// Evaluates `Σ_{m1,m2} 𝒢(m1,m2,M) 𝒢(m1,m2,M') - δ_{MM'} g_{ℓ;d}`.
pub fn lemcg_check(table: &GauntTable) -> Result<LemcgResiduals> {
    if table.l % 2 == 1 {
        return domain(format!(
            "the double-sum identity needs even ℓ, got {}",
            table.l
        ));
    }
    let n = table.n;
    let dense = table.dense();
    let g = g_value(table.d, table.l)?;
    let mut residuals = vec![0.0; n * n];
    let (mut max_offdiag, mut max_diag_rel): (f64, f64) = (0.0, 0.0);
    for m in 0..n {
        for mp in m..n {
            let (x, y) = (
                &dense[m * n * n..(m + 1) * n * n],
                &dense[mp * n * n..(mp + 1) * n * n],
            );
            let s: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            if m == mp {
                residuals[m * n + m] = s - g;
                max_diag_rel = max_diag_rel.max(((s - g) / g).abs());
            } else {
                residuals[m * n + mp] = s;
                residuals[mp * n + m] = s;
                max_offdiag = max_offdiag.max(s.abs());
            }
        }
    }
    Ok(LemcgResiduals {
        d: table.d,
        l: table.l,
        n,
        g,
        residuals,
        max_offdiag,
        max_diag_rel,
    })
}
