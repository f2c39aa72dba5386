use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use chemotaxis_core::config::{self, RunConfig};
use chemotaxis_core::diagnostics::{self, CSV_COLUMNS};
use chemotaxis_core::{run, witness, Error};

fn to_py(e: Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Model parameters; every field is readable and writable.
#[pyclass(name = "ModelParams", from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    #[pyo3(get, set)]
    d1: f64,
    #[pyo3(get, set)]
    d2: f64,
    #[pyo3(get, set)]
    alpha: f64,
    #[pyo3(get, set)]
    beta: f64,
    #[pyo3(get, set)]
    gamma: f64,
    #[pyo3(get, set)]
    delta: f64,
    #[pyo3(get, set)]
    a0: f64,
    #[pyo3(get, set)]
    b0: f64,
    #[pyo3(get, set)]
    c0: f64,
    #[pyo3(get, set)]
    m: f64,
    #[pyo3(get, set)]
    q: f64,
    #[pyo3(get, set)]
    r: f64,
    #[pyo3(get, set)]
    chi0: f64,
    #[pyo3(get, set)]
    xi0: f64,
    #[pyo3(get, set)]
    k1: f64,
    #[pyo3(get, set)]
    k2: f64,
    #[pyo3(get, set)]
    n: u32,
}

impl From<&PyModelParams> for chemotaxis_core::ModelParams {
    fn from(p: &PyModelParams) -> Self {
        Self {
            d1: p.d1,
            d2: p.d2,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
            a0: p.a0,
            b0: p.b0,
            c0: p.c0,
            m: p.m,
            q: p.q,
            r: p.r,
            chi0: p.chi0,
            xi0: p.xi0,
            k1: p.k1,
            k2: p.k2,
            n: p.n,
        }
    }
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (
        d1=1.0, d2=1.0, alpha=1.0, beta=1.0, gamma=1.0, delta=1.0,
        a0=1.0, b0=1.0, c0=1.0, m=1.0, q=1.0, r=1.0,
        chi0=1.0, xi0=1.0, k1=2.0, k2=2.0, n=1
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        d1: f64,
        d2: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        a0: f64,
        b0: f64,
        c0: f64,
        m: f64,
        q: f64,
        r: f64,
        chi0: f64,
        xi0: f64,
        k1: f64,
        k2: f64,
        n: u32,
    ) -> Self {
        Self { d1, d2, alpha, beta, gamma, delta, a0, b0, c0, m, q, r, chi0, xi0, k1, k2, n }
    }

    fn in_theorem_regime(&self) -> bool {
        chemotaxis_core::ModelParams::from(self).in_theorem_regime()
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParams(m={}, q={}, r={}, k1={}, k2={}, chi0={}, xi0={}, n={})",
            self.m, self.q, self.r, self.k1, self.k2, self.chi0, self.xi0, self.n
        )
    }
}

/// Returns `{"checks": [(name, passed, detail, hard), ...], "in_regime": bool}`.
#[pyfunction]
fn validate_params<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Bound<'py, PyDict>> {
    let report = chemotaxis_core::validate_params(&params.into());
    let checks: Vec<(String, bool, String, bool)> = report
        .checks
        .into_iter()
        .map(|c| (c.name, c.passed, c.detail, c.hard))
        .collect();
    let d = PyDict::new(py);
    d.set_item("checks", checks)?;
    d.set_item("in_regime", report.in_regime)?;
    Ok(d)
}

fn witness_dict<'py>(py: Python<'py>, w: &witness::ExponentWitness) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (k, v) in w.fields() {
        d.set_item(k, v)?;
    }
    Ok(d)
}

/// Exponent witness as a dict; raises ValueError outside the theorem regime.
#[pyfunction]
fn find_exponent_witness<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Bound<'py, PyDict>> {
    let w = chemotaxis_core::find_exponent_witness(&params.into()).map_err(to_py)?;
    witness_dict(py, &w)
}

#[pyfunction]
fn admissible_eta_range(m: f64, q: f64, r: f64) -> Option<(f64, f64)> {
    witness::admissible_eta_range(m, q, r)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn sigma12(p: f64, eta: f64, m: f64, q: f64, r: f64, k1: f64, k2: f64) -> PyResult<(f64, f64)> {
    witness::sigma12(p, eta, m, q, r, k1, k2).map_err(to_py)
}

#[pyfunction]
fn gn_exponents(p: f64, m: f64, n: u32) -> PyResult<(f64, f64, f64)> {
    witness::gn_exponents(p, m, n).map_err(to_py)
}

/// Returns `{"bounded": bool, "sup_y": float, "c17": float | None, "c18": float | None}`.
#[pyfunction]
fn ode_envelope_check<'py>(py: Python<'py>, series: Vec<(f64, f64)>, kappa: f64) -> PyResult<Bound<'py, PyDict>> {
    let rep = diagnostics::ode_envelope_check(&series, kappa).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("bounded", rep.bounded())?;
    d.set_item("sup_y", rep.sup_y)?;
    d.set_item("c17", rep.best_fit().map(|f| f.c17))?;
    d.set_item("c18", rep.best_fit().map(|f| f.c18))?;
    Ok(d)
}

/// A run configuration in the `key = value` text format.
#[pyclass(name = "RunConfig", from_py_object)]
#[derive(Clone)]
struct PyRunConfig {
    inner: RunConfig,
}

#[pymethods]
impl PyRunConfig {
    #[new]
    #[pyo3(signature = (text=""))]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: config::parse_config(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        config::preset(name)
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset '{name}'")))
    }

    /// Sets one key; the result is re-validated.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        let mut next = self.inner.clone();
        match next.set(key, value) {
            Ok(true) => {}
            Ok(false) => return Err(PyValueError::new_err(format!("unknown key '{key}'"))),
            Err(msg) => return Err(PyValueError::new_err(format!("{key}: {msg}"))),
        }
        next.check().map_err(|(k, m)| PyValueError::new_err(format!("{k}: {m}")))?;
        self.inner = next;
        Ok(())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("RunConfig(<{} keys>)", self.inner.entries().len())
    }
}

/// Integrates `config`, optionally writing a run directory. Returns a dict
/// with `status`, `t_final`, `steps`, `witness`, `envelope_bounded` and
/// `records` (a dict of column lists keyed by the CSV header).
#[pyfunction]
#[pyo3(signature = (config, out_dir=None))]
fn simulate<'py>(py: Python<'py>, config: &PyRunConfig, out_dir: Option<PathBuf>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.inner.clone();
    let outcome = py
        .detach(move || run::execute(&cfg, out_dir.as_deref()))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("status", outcome.status.name())?;
    d.set_item("t_final", outcome.t_final)?;
    d.set_item("steps", outcome.steps)?;
    match &outcome.witness {
        Some(w) => d.set_item("witness", witness_dict(py, w)?)?,
        None => d.set_item("witness", py.None())?,
    }
    d.set_item("envelope_bounded", outcome.envelope.as_ref().map(|e| e.bounded()))?;
    let cols = PyDict::new(py);
    let rs = &outcome.records;
    let getters: [fn(&diagnostics::DiagnosticsRecord) -> f64; 11] = [
        |r| r.t,
        |r| r.dt,
        |r| r.mass_u,
        |r| r.linf_u,
        |r| r.lp_u,
        |r| r.min_v,
        |r| r.min_w,
        |r| r.l2_v,
        |r| r.l2_w,
        |r| r.y,
        |r| r.clamp_events_cum as f64,
    ];
    for (name, get) in CSV_COLUMNS.iter().zip(getters) {
        cols.set_item(*name, rs.iter().map(get).collect::<Vec<f64>>())?;
    }
    d.set_item("records", cols)?;
    Ok(d)
}

#[pymodule]
fn chemotaxis(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyRunConfig>()?;
    m.add_function(wrap_pyfunction!(validate_params, m)?)?;
    m.add_function(wrap_pyfunction!(find_exponent_witness, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_eta_range, m)?)?;
    m.add_function(wrap_pyfunction!(sigma12, m)?)?;
    m.add_function(wrap_pyfunction!(gn_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(ode_envelope_check, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("CSV_COLUMNS", CSV_COLUMNS.to_vec())?;
    Ok(())
}
