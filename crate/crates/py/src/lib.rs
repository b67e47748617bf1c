//! Python bindings. Built as the extension module `funcineq`.
//!
//! Rich results come back as plain dicts (through their serde form);
//! potentials may be passed either as `Weight` objects or DSL strings.

use funcineq::bessel_certify::{hi_coefficients, pair_coefficients, PairSpec};
use funcineq::best_constants::{beta_constant, rayleigh_minimize, QuadraticForm};
use funcineq::moser::{ghigi_phi, minimize_i_alpha, singular_moser_threshold, ConvexFunction};
use funcineq::radial_ode::{certify_positive, DEFAULT_TOL};
use funcineq::transport::{wasserstein_1d, DensityGrid};
use funcineq::weight_dsl::{parse_weight, WeightExpr};
use funcineq::Error;
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::Parse { .. } | Error::InvalidInput(_) => PyValueError::new_err(e.to_string()),
    }
}

/// Converts a JSON value into the matching Python object.
fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any(),
            _ => py.None().into_bound(py),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn dict<'py>(py: Python<'py>, x: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A radial weight parsed from the expression language.
#[pyclass(frozen, skip_from_py_object, name = "Weight", module = "funcineq")]
#[derive(Clone)]
pub struct Weight {
    inner: WeightExpr,
}

#[pymethods]
impl Weight {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Weight { inner: parse_weight(text).map_err(py_err)? })
    }

    fn __call__(&self, r: f64) -> f64 {
        self.inner.eval(r)
    }

    fn derivative(&self, order: u32) -> PyResult<Weight> {
        Ok(Weight { inner: self.inner.differentiate(order).map_err(py_err)? })
    }

    #[getter]
    fn domain_max(&self) -> f64 {
        self.inner.domain_max
    }

    #[getter]
    fn singular_order(&self) -> f64 {
        self.inner.singular_order
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Weight({:?})", self.inner.to_string())
    }
}

fn weight(obj: &Bound<'_, PyAny>) -> PyResult<WeightExpr> {
    if let Ok(w) = obj.cast::<Weight>() {
        return Ok(w.get().inner.clone());
    }
    let text: String = obj.extract()?;
    parse_weight(&text).map_err(py_err)
}

/// Positivity certificate for `y'' + y'/r + P y = 0` on `(0, R)`.
#[pyfunction]
#[pyo3(signature = (potential, radius, tol = DEFAULT_TOL))]
fn is_hi_potential<'py>(py: Python<'py>, potential: &Bound<'py, PyAny>, radius: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let p = weight(potential)?;
    let cert = certify_positive(&hi_coefficients(&p, radius).map_err(py_err)?, tol).map_err(py_err)?;
    dict(py, &cert)
}

/// Positivity certificate for the Bessel-pair ODE of `(V, W)` in dimension `n`.
#[pyfunction]
#[pyo3(signature = (v, w, n, radius, tol = DEFAULT_TOL))]
fn is_bessel_pair<'py>(
    py: Python<'py>,
    v: &Bound<'py, PyAny>,
    w: &Bound<'py, PyAny>,
    n: u32,
    radius: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = PairSpec::new(weight(v)?, weight(w)?, n, radius, None).map_err(py_err)?;
    let cert = certify_positive(&pair_coefficients(&spec).map_err(py_err)?, tol).map_err(py_err)?;
    dict(py, &cert)
}

/// Best constant `β(P, R)` of the improved Hardy inequality.
#[pyfunction]
fn beta<'py>(py: Python<'py>, potential: &Bound<'py, PyAny>, n: u32, radius: f64) -> PyResult<Bound<'py, PyAny>> {
    dict(py, &beta_constant(&weight(potential)?, n, radius).map_err(py_err)?)
}

/// Discrete Rayleigh minimum for `hardy`, `hardy-rellich` or `improved-hardy`.
#[pyfunction]
#[pyo3(signature = (form, n, radius = 1.0, grid = 256, potential = None))]
fn rayleigh<'py>(
    py: Python<'py>,
    form: &str,
    n: u32,
    radius: f64,
    grid: usize,
    potential: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let q = match (form, potential) {
        ("hardy", _) => QuadraticForm::hardy(n, radius),
        ("hardy-rellich", _) => QuadraticForm::hardy_rellich(n, radius),
        ("improved-hardy", Some(p)) => QuadraticForm::improved_hardy(n, &weight(p)?, radius),
        ("improved-hardy", None) => return Err(PyValueError::new_err("improved-hardy needs a potential")),
        _ => return Err(PyValueError::new_err(format!("unknown form `{form}`"))),
    };
    dict(py, &rayleigh_minimize(&q, grid).map_err(py_err)?)
}

/// W₂ distance between two Gaussians sampled on uniform grids.
#[pyfunction]
#[pyo3(signature = (m0, s0, m1, s1, nodes = 2001))]
fn w2_gaussian(m0: f64, s0: f64, m1: f64, s1: f64, nodes: usize) -> PyResult<f64> {
    let a = DensityGrid::gaussian(m0, s0, nodes).map_err(py_err)?;
    let b = DensityGrid::gaussian(m1, s1, nodes).map_err(py_err)?;
    Ok(wasserstein_1d(&a, &b).map_err(py_err)?.value)
}

/// Ghigi's functional of the piecewise-linear convex function through `(xs, values)`.
#[pyfunction]
fn ghigi(xs: Vec<f64>, values: Vec<f64>) -> PyResult<f64> {
    ghigi_phi(&ConvexFunction::new(xs, values).map_err(py_err)?).map_err(py_err)
}

/// Constrained minimisation of `I_α` on `(-1, 1)`.
#[pyfunction]
#[pyo3(signature = (alpha, budget = 300))]
fn minimize_i_alpha_py<'py>(py: Python<'py>, alpha: f64, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    dict(py, &minimize_i_alpha(alpha, budget).map_err(py_err)?)
}

#[pyfunction]
fn moser_threshold(n: u32, alpha: f64) -> PyResult<f64> {
    singular_moser_threshold(n, alpha).map_err(py_err)
}

/// Runs a command line (`"beta --potential 1 --n 3 --R 1"`) and returns the
/// report as a dict.
#[pyfunction]
fn run<'py>(py: Python<'py>, line: &str) -> PyResult<Bound<'py, PyAny>> {
    let cmd = funcineq_cli::parse_command_line(line).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = funcineq_cli::run(&cmd).map_err(|e| match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    })?;
    dict(py, &report)
}

#[pymodule]
#[pyo3(name = "funcineq")]
fn funcineq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Weight>()?;
    m.add_function(wrap_pyfunction!(is_hi_potential, m)?)?;
    m.add_function(wrap_pyfunction!(is_bessel_pair, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(rayleigh, m)?)?;
    m.add_function(wrap_pyfunction!(w2_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(ghigi, m)?)?;
    m.add("minimize_i_alpha", wrap_pyfunction!(minimize_i_alpha_py, m)?)?;
    m.add_function(wrap_pyfunction!(moser_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
