//! Python bindings. Structured results come back as plain dicts and lists.

use std::fmt::Display;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use sveiqhr::dynamics::{self, IntegratorConfig};
use sveiqhr::model::{self, ParamName};
use sveiqhr::{equilibrium, strategy};

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(value_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn param_name(name: &str) -> PyResult<ParamName> {
    name.parse().map_err(value_err)
}

/// The seventeen model parameters. `delta` and `u2` have no tabulated
/// default; anything else may be overridden by keyword.
#[pyclass(name = "ModelParameters", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyModelParameters {
    inner: model::ModelParameters,
}

#[pymethods]
impl PyModelParameters {
    #[new]
    #[pyo3(signature = (delta, u2, **overrides))]
    fn new(delta: f64, u2: f64, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = model::ModelParameters::table1(delta, u2).map_err(value_err)?;
        if let Some(kw) = overrides {
            for (k, v) in kw.iter() {
                let name = param_name(&k.extract::<String>()?)?;
                p = p.with(name, v.extract::<f64>()?).map_err(value_err)?;
            }
        }
        Ok(PyModelParameters { inner: p })
    }

    #[staticmethod]
    fn disease_free_case() -> Self {
        PyModelParameters {
            inner: model::ModelParameters::disease_free_case(),
        }
    }

    #[staticmethod]
    fn endemic_case() -> Self {
        PyModelParameters {
            inner: model::ModelParameters::endemic_case(),
        }
    }

    fn get(&self, name: &str) -> PyResult<f64> {
        Ok(self.inner.get(param_name(name)?))
    }

    /// Copy with one parameter replaced.
    fn with_value(&self, name: &str, value: f64) -> PyResult<Self> {
        let inner = self.inner.with(param_name(name)?, value).map_err(value_err)?;
        Ok(PyModelParameters { inner })
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for name in ParamName::ALL {
            d.set_item(name.as_str(), self.inner.get(name))?;
        }
        Ok(d)
    }

    fn r0(&self) -> f64 {
        equilibrium::compute_r0(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParameters(delta={}, u1={}, u2={}, u3={}, u4={}, u5={})",
            self.inner.delta(),
            self.inner.u1(),
            self.inner.u2(),
            self.inner.u3(),
            self.inner.u4(),
            self.inner.u5()
        )
    }
}

/// Compartment sizes S, V, E, I, Q, H, R.
#[pyclass(name = "State", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyState {
    inner: model::State,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(s: f64, v: f64, e: f64, i: f64, q: f64, h: f64, r: f64) -> Self {
        PyState {
            inner: model::State::from_array([s, v, e, i, q, h, r]),
        }
    }

    #[getter]
    fn s(&self) -> f64 {
        self.inner.s
    }
    #[getter]
    fn v(&self) -> f64 {
        self.inner.v
    }
    #[getter]
    fn e(&self) -> f64 {
        self.inner.e
    }
    #[getter]
    fn i(&self) -> f64 {
        self.inner.i
    }
    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }
    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }
    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn non_healthy(&self) -> f64 {
        self.inner.non_healthy()
    }

    fn to_list(&self) -> Vec<f64> {
        self.inner.to_array().to_vec()
    }

    fn __repr__(&self) -> String {
        let [s, v, e, i, q, h, r] = self.inner.to_array();
        format!("State(S={s}, V={v}, E={e}, I={i}, Q={q}, H={h}, R={r})")
    }
}

#[pyfunction]
fn compute_r0(params: &PyModelParameters) -> f64 {
    equilibrium::compute_r0(&params.inner)
}

#[pyfunction]
fn disease_free_equilibrium(params: &PyModelParameters) -> PyState {
    PyState {
        inner: equilibrium::disease_free_equilibrium(&params.inner),
    }
}

/// Roots of the endemic quadratic and the positive equilibrium, if any.
#[pyfunction]
fn endemic_equilibrium(py: Python<'_>, params: &PyModelParameters) -> PyResult<Py<PyAny>> {
    let rep = equilibrium::endemic_equilibrium(&params.inner).map_err(value_err)?;
    to_py(py, &rep)
}

#[pyfunction]
fn dfe_stability(py: Python<'_>, params: &PyModelParameters) -> PyResult<Py<PyAny>> {
    let rep = equilibrium::dfe_stability(&params.inner).map_err(value_err)?;
    to_py(py, &rep)
}

fn integrator(
    method: &str,
    step: f64,
    horizon: f64,
    sample_interval: f64,
) -> PyResult<IntegratorConfig> {
    let cfg = match method {
        "rk45" => IntegratorConfig::adaptive(horizon, sample_interval),
        "rk4" => IntegratorConfig::rk4(step, horizon, sample_interval),
        other => return Err(PyValueError::new_err(format!("unknown method `{other}`"))),
    };
    cfg.validate().map_err(value_err)?;
    Ok(cfg)
}

/// Integrates from `initial` (default seeding when omitted). Returns a
/// dict with `times`, `states` (rows of S..R), `total` and `non_healthy`.
#[pyfunction]
#[pyo3(signature = (params, initial=None, horizon=730.0, sample_interval=1.0, method="rk45", step=0.1))]
fn simulate(
    py: Python<'_>,
    params: &PyModelParameters,
    initial: Option<&PyState>,
    horizon: f64,
    sample_interval: f64,
    method: &str,
    step: f64,
) -> PyResult<Py<PyAny>> {
    let cfg = integrator(method, step, horizon, sample_interval)?;
    let x0 = initial.map_or_else(dynamics::default_initial_state, |s| s.inner);
    let traj = py
        .detach(|| dynamics::simulate(&params.inner, &x0, &cfg))
        .map_err(value_err)?;
    let states: Vec<[f64; 7]> = traj.states().iter().map(|x| x.to_array()).collect();
    to_py(
        py,
        &serde_json::json!({
            "times": traj.times(),
            "states": states,
            "total": traj.total(),
            "non_healthy": traj.non_healthy(),
        }),
    )
}

#[pyfunction]
fn sensitivity_index(params: &PyModelParameters, name: &str) -> PyResult<f64> {
    strategy::sensitivity_index(&params.inner, param_name(name)?).map_err(value_err)
}

/// Rows of the sensitivity table, most significant first.
#[pyfunction]
fn significance_ranking(py: Python<'_>, params: &PyModelParameters) -> PyResult<Py<PyAny>> {
    let table = strategy::significance_ranking(&params.inner).map_err(value_err)?;
    let mut rows = table.rows.clone();
    rows.sort_by_key(|r| r.rank);
    to_py(py, &rows)
}

#[pyfunction]
fn region_geometry(py: Python<'_>, params: &PyModelParameters, delta: f64) -> PyResult<Py<PyAny>> {
    let g = strategy::region_geometry(&params.inner, delta).map_err(value_err)?;
    to_py(py, &g)
}

#[pyfunction]
fn ppkm_level_u2(level: u8) -> PyResult<f64> {
    strategy::ppkm_level_u2(level).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (params, targets=None, boosts=None, horizon=730.0, sample_interval=1.0))]
fn intervention_sweep(
    py: Python<'_>,
    params: &PyModelParameters,
    targets: Option<Vec<String>>,
    boosts: Option<Vec<f64>>,
    horizon: f64,
    sample_interval: f64,
) -> PyResult<Py<PyAny>> {
    let targets = match targets {
        Some(t) => t.iter().map(|s| param_name(s)).collect::<PyResult<Vec<_>>>()?,
        None => ParamName::INTERVENTIONS.to_vec(),
    };
    let boosts = boosts.unwrap_or_else(|| vec![0.3, 0.6]);
    let cfg = integrator("rk45", 0.0, horizon, sample_interval)?;
    let x0 = dynamics::default_initial_state();
    let rep = py
        .detach(|| strategy::intervention_sweep(&params.inner, &x0, &cfg, &targets, &boosts))
        .map_err(value_err)?;
    to_py(py, &rep)
}

#[pymodule]
#[pyo3(name = "sveiqhr")]
fn sveiqhr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParameters>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(compute_r0, m)?)?;
    m.add_function(wrap_pyfunction!(disease_free_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(endemic_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(dfe_stability, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity_index, m)?)?;
    m.add_function(wrap_pyfunction!(significance_ranking, m)?)?;
    m.add_function(wrap_pyfunction!(region_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(ppkm_level_u2, m)?)?;
    m.add_function(wrap_pyfunction!(intervention_sweep, m)?)?;
    Ok(())
}
