//! Python bindings. Sectors are passed as `"plus"` or `"minus"`; failures of
//! argument validation raise `ValueError`, tolerance and truncation failures
//! raise `RuntimeError`.

use std::collections::HashMap;

use phasekit::checks::{self, CheckParams, CheckSuite};
use phasekit::coherent::{self, CoherentParams, DEFAULT_TAIL_TOL, SCAN_FOURIER_CUTOFF};
use phasekit::linalg::{self, OperatorMatrix};
use phasekit::phase::{self, PhaseKernel};
use phasekit::rotator::{self, AlphaExtension, RotatorTruncation};
use phasekit::{Complex64, Error, PhaseSector, ScanTable, ToleranceConfig, Value};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Dimension(_) | Error::Range(_) | Error::Grid(_) | Error::Config(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_sector(name: &str) -> PyResult<PhaseSector> {
    name.parse().map_err(py_err)
}

/// Dense operator matrix with its basis label.
#[pyclass(name = "Operator", frozen)]
struct PyOperator(OperatorMatrix);

#[pymethods]
impl PyOperator {
    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn basis(&self) -> String {
        format!("{:?}", self.0.basis()).to_ascii_lowercase()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<Complex64> {
        if row >= self.0.dim() || col >= self.0.dim() {
            return Err(PyValueError::new_err(format!(
                "index ({row}, {col}) out of range"
            )));
        }
        Ok(self.0.get(row, col))
    }

    /// Rows of complex entries.
    fn entries(&self) -> Vec<Vec<Complex64>> {
        let n = self.0.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.0.get(i, j)).collect())
            .collect()
    }

    /// Ascending eigenvalues.
    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(linalg::eigen_decompose(&self.0)
            .map_err(py_err)?
            .eigenvalues)
    }

    fn hermitian_residual(&self) -> f64 {
        self.0.hermitian_residual()
    }

    fn __repr__(&self) -> String {
        format!("Operator(dim={}, basis={})", self.0.dim(), self.basis())
    }
}

/// Columns, rows and `# key: value` metadata of a result table.
#[pyclass(name = "Table", frozen)]
struct PyTable(ScanTable);

#[pymethods]
impl PyTable {
    #[getter]
    fn columns(&self) -> Vec<String> {
        self.0.columns().to_vec()
    }

    #[getter]
    fn meta(&self) -> Vec<(String, String)> {
        self.0.meta().to_vec()
    }

    /// Rows as lists of `int`, `float` or `str`.
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        self.0
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| -> PyResult<Bound<'py, PyAny>> {
                        Ok(match v {
                            Value::Int(i) => i.into_pyobject(py)?.into_any(),
                            Value::Real(x) => x.into_pyobject(py)?.into_any(),
                            Value::Text(s) => s.into_pyobject(py)?.into_any(),
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Values of a numeric column.
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        self.0
            .real_column(name)
            .ok_or_else(|| PyValueError::new_err(format!("no numeric column {name:?}")))
    }

    #[pyo3(signature = (with_meta = true))]
    fn to_csv(&self, with_meta: bool) -> String {
        self.0.to_csv(with_meta)
    }

    #[pyo3(signature = (with_meta = true))]
    fn to_json(&self, with_meta: bool) -> String {
        self.0.to_json(with_meta).to_string()
    }

    fn __len__(&self) -> usize {
        self.0.rows().len()
    }
}

#[pyclass(name = "CheckReport", frozen, get_all)]
struct PyCheckReport {
    passed: bool,
    failures: Vec<String>,
    table: Py<PyTable>,
}

fn tolerances(overrides: Option<HashMap<String, f64>>) -> PyResult<ToleranceConfig> {
    let mut tol = ToleranceConfig::default();
    for (k, v) in overrides.unwrap_or_default() {
        tol.set(&k, v).map_err(py_err)?;
    }
    tol.validate().map_err(py_err)?;
    Ok(tol)
}

#[pyfunction]
fn default_tolerances() -> HashMap<&'static str, f64> {
    ToleranceConfig::default().fields().into_iter().collect()
}

#[pyfunction]
fn build_abs_phase(sector: &str, dim: usize) -> PyResult<PyOperator> {
    phase::build_abs_phase(parse_sector(sector)?, dim)
        .map(PyOperator)
        .map_err(py_err)
}

#[pyfunction]
fn build_cos_phase(sector: &str, dim: usize) -> PyResult<PyOperator> {
    phase::build_cos_phase(parse_sector(sector)?, dim)
        .map(PyOperator)
        .map_err(py_err)
}

/// `f(Phi)` for `f(phi) = sum_k coeffs[k] cos(k phi)`.
#[pyfunction]
fn build_function_of_phase(coeffs: Vec<f64>, sector: &str, dim: usize) -> PyResult<PyOperator> {
    let kernel = PhaseKernel::new(coeffs).map_err(py_err)?;
    phase::build_function_of_phase(&kernel, parse_sector(sector)?, dim)
        .map(PyOperator)
        .map_err(py_err)
}

#[pyfunction]
fn cs_commutator(dim: usize) -> PyResult<PyOperator> {
    phase::cs_commutator_check(dim)
        .map(PyOperator)
        .map_err(py_err)
}

fn truncation(m_max: usize) -> PyResult<RotatorTruncation> {
    RotatorTruncation::new(m_max).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (m_max, alpha = 0.0))]
fn theta_matrix(m_max: usize, alpha: f64) -> PyResult<PyOperator> {
    let ext = AlphaExtension::new(alpha).map_err(py_err)?;
    Ok(PyOperator(rotator::theta_matrix(truncation(m_max)?, ext)))
}

#[pyfunction]
fn abs_theta_matrix(m_max: usize) -> PyResult<PyOperator> {
    Ok(PyOperator(rotator::abs_theta_matrix(truncation(m_max)?)))
}

/// Largest entry of `[J_z, Theta] + i(I - 2 pi |pi><pi|)`.
#[pyfunction]
fn rotator_identity_residual(m_max: usize) -> PyResult<f64> {
    Ok(rotator::commutator_identity_check(truncation(m_max)?))
}

#[pyfunction]
#[pyo3(signature = (nbar, theta, sector = "plus", dim = None, tail_tol = DEFAULT_TAIL_TOL))]
fn expect_abs_phase(
    nbar: f64,
    theta: f64,
    sector: &str,
    dim: Option<usize>,
    tail_tol: f64,
) -> PyResult<f64> {
    let mut p = CoherentParams::new(nbar, theta).with_tail_tol(tail_tol);
    if let Some(d) = dim {
        p = p.with_dim(d);
    }
    coherent::expect_abs_phase(&p, parse_sector(sector)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (nbar, tol = DEFAULT_TAIL_TOL))]
fn minimal_dim(nbar: f64, tol: f64) -> usize {
    coherent::minimal_dim(nbar, tol)
}

#[pyfunction]
#[pyo3(signature = (theta, cutoff = SCAN_FOURIER_CUTOFF))]
fn fourier_abs(theta: f64, cutoff: usize) -> PyResult<f64> {
    coherent::fourier_abs(theta, cutoff).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (thetas, nbars, sector = "plus", tail_tol = DEFAULT_TAIL_TOL, dim = None))]
fn coherent_scan(
    thetas: Vec<f64>,
    nbars: Vec<f64>,
    sector: &str,
    tail_tol: f64,
    dim: Option<usize>,
) -> PyResult<PyTable> {
    coherent::classical_limit_scan_at(&thetas, &nbars, parse_sector(sector)?, tail_tol, dim)
        .map(PyTable)
        .map_err(py_err)
}

/// Runs `"rotator"`, `"boundary"`, `"oracle"` or `"commutators"`.
#[pyfunction]
#[pyo3(signature = (name, m_max = 50, max_index = 64, tolerances = None))]
fn run_check(
    py: Python<'_>,
    name: &str,
    m_max: usize,
    max_index: usize,
    tolerances: Option<HashMap<String, f64>>,
) -> PyResult<PyCheckReport> {
    let suite: CheckSuite = name.parse().map_err(py_err)?;
    let tol = self::tolerances(tolerances)?;
    let report = py
        .detach(|| checks::run_check(suite, CheckParams { m_max, max_index }, &tol))
        .map_err(py_err)?;
    Ok(PyCheckReport {
        passed: report.passed(),
        failures: report.failures,
        table: Py::new(py, PyTable(report.table))?,
    })
}

#[pymodule(name = "phasekit")]
fn phasekit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyTable>()?;
    m.add_class::<PyCheckReport>()?;
    m.add_function(wrap_pyfunction!(default_tolerances, m)?)?;
    m.add_function(wrap_pyfunction!(build_abs_phase, m)?)?;
    m.add_function(wrap_pyfunction!(build_cos_phase, m)?)?;
    m.add_function(wrap_pyfunction!(build_function_of_phase, m)?)?;
    m.add_function(wrap_pyfunction!(cs_commutator, m)?)?;
    m.add_function(wrap_pyfunction!(theta_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(abs_theta_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(rotator_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(expect_abs_phase, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_dim, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_abs, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
