//! Python bindings for `hyperdefect`. Structured results come back as
//! plain dicts and lists.

use hyperdefect::{acceptance, chaos, harmonics, montecarlo, specfun, spherequad};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn to_py_err(e: hyperdefect::Error) -> PyErr {
    match e {
        hyperdefect::Error::Domain(_) | hyperdefect::Error::Parse(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(value_to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, value_to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

/// Normalized Gegenbauer polynomial `G_{ℓ;d}(t)`.
#[pyfunction]
fn gegenbauer(d: u32, l: u32, t: f64) -> PyResult<f64> {
    specfun::GegenbauerEvaluator::new(d, l)
        .and_then(|g| g.eval_checked(t))
        .map_err(to_py_err)
}

/// Scaled Bessel kernel `J̃_d(ψ)`.
#[pyfunction]
fn scaled_bessel(d: u32, psi: f64) -> PyResult<f64> {
    specfun::scaled_bessel(d, psi).map_err(to_py_err)
}

/// `∫ G_{ℓ;d}(cos θ)^k sin^{d-1} θ dθ` over `"full"` or `"half"` range.
#[pyfunction]
#[pyo3(signature = (d, l, k, range = "full"))]
fn gegenbauer_moment(d: u32, l: u32, k: u32, range: &str) -> PyResult<f64> {
    let range = match range {
        "full" => spherequad::MomentRange::Full,
        "half" => spherequad::MomentRange::Half,
        other => return Err(PyValueError::new_err(format!("unknown range {other:?}"))),
    };
    spherequad::gegenbauer_moment(d, l, k, range).map_err(to_py_err)
}

/// Chaos weight `w_q`.
#[pyfunction]
fn chaos_weight(q: u64) -> PyResult<f64> {
    chaos::chaos_weight(q).map_err(to_py_err)
}

/// Exact variance series with certified tail, as a dict.
#[pyfunction]
#[pyo3(signature = (d, l, tol = 1e-4))]
fn exact_variance<'py>(py: Python<'py>, d: u32, l: u32, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = chaos::exact_variance(d, l, tol).map_err(to_py_err)?;
    to_py(py, &r)
}

/// `c_{2q+1;d}` with error estimate and, for `q = 1`, the closed form.
#[pyfunction]
fn c_coefficient<'py>(py: Python<'py>, d: u32, q: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &chaos::c_coefficient(d, q).map_err(to_py_err)?)
}

/// Limiting constant `C_d` by `"series"` or `"integral"`.
#[pyfunction]
#[pyo3(signature = (d, method = "integral"))]
fn constant_estimate<'py>(py: Python<'py>, d: u32, method: &str) -> PyResult<Bound<'py, PyAny>> {
    let m: chaos::ConstantMethod = method.parse().map_err(to_py_err)?;
    to_py(py, &chaos::constant_estimate(d, m).map_err(to_py_err)?)
}

/// First-chaos lower bound on `C_d`.
#[pyfunction]
fn constant_lower_bound(d: u32) -> PyResult<f64> {
    chaos::constant_lower_bound(d).map_err(to_py_err)
}

/// Exact check of both combinatorial inequalities at `(q, p)`.
#[pyfunction]
fn facile_check<'py>(py: Python<'py>, q: u32, p: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &chaos::facile_check(q, p).map_err(to_py_err)?)
}

/// Nonzero Gaunt coefficients as `(m1, m2, m3, value)` with 1-based indices.
#[pyfunction]
fn gaunt_entries(d: u32, l: u32) -> PyResult<Vec<(usize, usize, usize, f64)>> {
    let t = harmonics::gaunt_table(d, l).map_err(to_py_err)?;
    Ok(t.nonzero().into_iter().map(|(a, b, c, v)| (a + 1, b + 1, c + 1, v)).collect())
}

/// Residuals of the double-sum Gaunt identity, without the full matrix.
#[pyfunction]
fn lemcg_check<'py>(py: Python<'py>, d: u32, l: u32) -> PyResult<Bound<'py, PyAny>> {
    let t = harmonics::gaunt_table(d, l).map_err(to_py_err)?;
    let r = harmonics::lemcg_check(&t).map_err(to_py_err)?;
    let summary = serde_json::json!({
        "d": r.d, "l": r.l, "n": r.n, "g": r.g,
        "max_offdiag": r.max_offdiag, "max_diag_rel": r.max_diag_rel,
    });
    value_to_py(py, &summary)
}

/// Closed circulant form and its `g_{ℓ;d}`.
#[pyfunction]
fn circulant_closed<'py>(py: Python<'py>, d: u32, l: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &harmonics::circulant_closed(d, l).map_err(to_py_err)?)
}

/// Monte Carlo CLT run; returns `{"diagnostics": {...}, "defects": [...]}`.
#[pyfunction]
#[pyo3(signature = (d, l, n, seed = 0, resolution = None, sampler = "spectral-basis"))]
fn clt_experiment<'py>(
    py: Python<'py>,
    d: u32,
    l: u32,
    n: usize,
    seed: u64,
    resolution: Option<u32>,
    sampler: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = montecarlo::CltConfig {
        seed,
        resolution,
        method: sampler.parse().map_err(to_py_err)?,
        ..montecarlo::CltConfig::default()
    };
    let r = py
        .detach(|| montecarlo::clt_experiment(d, l, n, &cfg))
        .map_err(to_py_err)?;
    to_py(py, &r)
}

/// Quantile-form Wasserstein-1 distance of samples to `N(0, 1)`.
#[pyfunction]
fn wasserstein1(samples: Vec<f64>) -> PyResult<f64> {
    if samples.len() < 2 {
        return Err(PyValueError::new_err("need at least two samples"));
    }
    Ok(montecarlo::wasserstein1_empirical(&samples))
}

/// Runs the given acceptance criteria (all by default).
#[pyfunction]
#[pyo3(signature = (ids = None))]
fn selftest<'py>(py: Python<'py>, ids: Option<Vec<u8>>) -> PyResult<Bound<'py, PyAny>> {
    let ids = ids.unwrap_or_else(|| (1..=10).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(PyValueError::new_err(format!("no criterion {bad}")));
    }
    let results: Vec<acceptance::Criterion> = py.detach(|| ids.iter().map(|&i| acceptance::run(i)).collect());
    to_py(py, &results)
}

#[pymodule]
fn hyperdefect_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gegenbauer, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_bessel, m)?)?;
    m.add_function(wrap_pyfunction!(gegenbauer_moment, m)?)?;
    m.add_function(wrap_pyfunction!(chaos_weight, m)?)?;
    m.add_function(wrap_pyfunction!(exact_variance, m)?)?;
    m.add_function(wrap_pyfunction!(c_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(constant_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(constant_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(facile_check, m)?)?;
    m.add_function(wrap_pyfunction!(gaunt_entries, m)?)?;
    m.add_function(wrap_pyfunction!(lemcg_check, m)?)?;
    m.add_function(wrap_pyfunction!(circulant_closed, m)?)?;
    m.add_function(wrap_pyfunction!(clt_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(wasserstein1, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
