//! Python bindings: catalog models, connections at a point, holonomy
//! approximations, extremal frames and the verification runner.

use holomat::conn::{bianchi_residual, connection, ConnectionData, ConnectionKind};
use holomat::hol::{holonomy_algebra, is_irreducible};
use holomat::kforms::{fs_shifted, greedy_extremal_frame};
use holomat::linalg::CMat;
use holomat::models::{catalog, catalog_names as names, ManifoldModel, Params};
use holomat::verify::{run_checks, CheckConfig, CheckId, CheckReport, ModelSpec};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

create_exception!(holomat_py, HolomatError, PyValueError);

fn err(e: holomat::Error) -> PyErr {
    HolomatError::new_err(e.to_string())
}

fn matrix(a: &CMat) -> Vec<Vec<Complex64>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect()).collect()
}

fn to_python<'py>(py: Python<'py>, value: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value,))
}

fn params_from<'py>(py: Python<'py>, params: Option<&Bound<'py, PyDict>>) -> PyResult<Params> {
    let Some(d) = params else { return Ok(Params::new()) };
    let text: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| HolomatError::new_err(format!("params: {e}")))
}

fn kind_from(kind: &str, t: Option<f64>) -> PyResult<ConnectionKind> {
    ConnectionKind::parse(kind, t).map_err(err)
}

fn report_to_python<'py>(py: Python<'py>, report: &CheckReport) -> PyResult<Bound<'py, PyAny>> {
    to_python(py, &report.to_json())
}

/// A catalog model with its parameters.
#[pyclass(name = "Model", module = "holomat_py", frozen)]
struct PyModel {
    inner: ManifoldModel,
    params: Params,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (name, params=None))]
    fn new(py: Python<'_>, name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let params = params_from(py, params)?;
        let inner = catalog(name, &params).map_err(err)?;
        Ok(Self { inner, params })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    /// Complex dimension.
    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn invariant(&self) -> bool {
        self.inner.is_invariant()
    }

    #[getter]
    fn expected(&self) -> Vec<String> {
        self.inner.expected.clone()
    }

    #[getter]
    fn fd_step(&self) -> f64 {
        self.inner.fd_step
    }

    fn base_point(&self) -> Vec<Complex64> {
        self.inner.base_point()
    }

    fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.inner.sample_point(&mut rng)).collect()
    }

    /// Hermitian matrix `h_{ij̄}` at `z`.
    fn metric(&self, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.check_point(&z)?;
        Ok(matrix(&self.inner.metric(&z)))
    }

    #[pyo3(signature = (kind, z=None, t=None))]
    fn connection(&self, py: Python<'_>, kind: &str, z: Option<Vec<Complex64>>, t: Option<f64>) -> PyResult<PyConnection> {
        let kind = kind_from(kind, t)?;
        let z = z.unwrap_or_else(|| self.inner.base_point());
        self.check_point(&z)?;
        let model = &self.inner;
        let inner = py.detach(|| connection(model, kind, &z)).map_err(err)?;
        Ok(PyConnection { inner })
    }

    /// Restricted holonomy algebra at the base point.
    #[pyo3(signature = (kind, t=None, order=2))]
    fn holonomy<'py>(&self, py: Python<'py>, kind: &str, t: Option<f64>, order: usize) -> PyResult<Bound<'py, PyDict>> {
        let kind = kind_from(kind, t)?;
        let model = &self.inner;
        let hol = py.detach(|| holonomy_algebra(model, kind, &model.base_point(), order)).map_err(err)?;
        let irr = is_irreducible(&hol.algebra);
        let out = PyDict::new(py);
        out.set_item("dim", hol.algebra.dim())?;
        out.set_item("dims_by_order", hol.dims_by_order.clone())?;
        out.set_item("stable", hol.stable)?;
        out.set_item("exact", hol.exact)?;
        out.set_item("irreducible", irr.is_irreducible())?;
        out.set_item("commutant_dim", irr.commutant_dim())?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        let params = serde_json::to_string(&self.params).unwrap_or_default();
        format!("Model({:?}, m={}, params={params})", self.inner.name, self.inner.m)
    }
}

impl PyModel {
    fn check_point(&self, z: &[Complex64]) -> PyResult<()> {
        if z.len() != self.inner.m {
            return Err(HolomatError::new_err(format!("point has {} coordinates, model has m = {}", z.len(), self.inner.m)));
        }
        Ok(())
    }
}

/// Connection coefficients, torsion and curvature at one point.
#[pyclass(name = "Connection", module = "holomat_py", frozen)]
struct PyConnection {
    inner: ConnectionData,
}

#[pymethods]
impl PyConnection {
    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.label()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.inner.exact
    }

    fn torsion_norm(&self) -> f64 {
        self.inner.torsion_norm()
    }

    fn torsion_derivative_norm(&self) -> f64 {
        self.inner.torsion_derivative_norm()
    }

    fn curvature_norm(&self) -> f64 {
        self.inner.curvature_norm()
    }

    fn d_omega_norm(&self) -> f64 {
        self.inner.d_omega_norm()
    }

    fn metric_residual(&self) -> f64 {
        self.inner.metric_residual()
    }

    fn j_residual(&self) -> f64 {
        self.inner.j_residual()
    }

    /// Generalized first Bianchi residual.
    #[pyo3(signature = (with_derivative=true))]
    fn bianchi_residual(&self, with_derivative: bool) -> f64 {
        bianchi_residual(&self.inner, with_derivative)
    }

    fn chern_ricci(&self) -> Vec<Vec<Complex64>> {
        matrix(&self.inner.chern_ricci())
    }

    fn chern_ricci_norm(&self) -> f64 {
        self.inner.chern_ricci_norm()
    }

    fn __repr__(&self) -> String {
        format!("Connection({}, |T|={:.3e}, |R|={:.3e})", self.inner.kind.label(), self.inner.torsion_norm(), self.inner.curvature_norm())
    }
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    names()
}

#[pyfunction]
fn check_names() -> Vec<&'static str> {
    CheckId::ALL.iter().map(|c| c.name()).collect()
}

/// Greedy extremal frame of a random positive perturbation of Fubini-Study.
#[pyfunction]
fn extremal_frame<'py>(py: Python<'py>, m: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = py
        .detach(|| {
            let t = fs_shifted(m, &mut rng)?;
            greedy_extremal_frame(&t, &mut rng)
        })
        .map_err(err)?;
    to_python(py, &serde_json::to_string(&frame).map_err(|e| HolomatError::new_err(e.to_string()))?)
}

/// Runs a TOML config given as text and returns the report as a dict.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = CheckConfig::from_toml(text).map_err(err)?;
    let report = py.detach(|| run_checks(&cfg)).map_err(err)?;
    report_to_python(py, &report)
}

/// Runs a config file; the report is written to its `output` path if set.
#[pyfunction]
fn run_config_file<'py>(py: Python<'py>, path: std::path::PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| holomat::verify::run_config_file(&path)).map_err(err)?;
    report_to_python(py, &report)
}

/// Runs one check on one model.
#[pyfunction]
#[pyo3(signature = (name, model=None, kind=None, t=None, samples=None, seed=None))]
fn check<'py>(
    py: Python<'py>,
    name: &str,
    model: Option<&str>,
    kind: Option<&str>,
    t: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let id = CheckId::parse(name).map_err(err)?;
    let mut cfg = CheckConfig { checks: vec![id], ..CheckConfig::default() };
    cfg.models = model.map(|m| vec![ModelSpec::named(m)]).unwrap_or_default();
    if let Some(k) = kind {
        cfg.kinds = vec![kind_from(k, t)?];
    }
    if let Some(s) = samples {
        cfg.samples = s.max(1);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = py.detach(|| run_checks(&cfg)).map_err(err)?;
    report_to_python(py, &report)
}

#[pymodule]
fn holomat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HolomatError", m.py().get_type::<HolomatError>())?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyConnection>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    m.add_function(wrap_pyfunction!(extremal_frame, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config_file, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}
