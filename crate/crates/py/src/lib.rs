//! Python bindings for `nonunitary_lab`.

use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use nonunitary_lab::analytic;
use nonunitary_lab::eigensys::{self, SolveOptions};
use nonunitary_lab::entanglement::{self, all_cell_cuts};
use nonunitary_lab::fidelity::{self, lambda_grid};
use nonunitary_lab::linalg;
use nonunitary_lab::model::build_hamiltonian;
use nonunitary_lab::scaling::{self, Geometry};
use nonunitary_lab::{presets, Boundary, Error};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Eigen(_) | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialize through JSON into plain Python objects.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn solve_options(ep_eta: Option<f64>) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(eta) = ep_eta {
        opts.ep_eta = (eta > 0.0).then_some(eta);
    }
    opts
}

#[pyclass(name = "ChainSpec", module = "nonunitary_lab")]
#[derive(Clone)]
struct PyChainSpec {
    inner: nonunitary_lab::ChainSpec,
}

#[pymethods]
impl PyChainSpec {
    #[new]
    #[pyo3(signature = (n_cells, boundary = "PBC", v1 = 1.0, w1 = -1.0, phi = 0.0))]
    fn new(n_cells: usize, boundary: &str, v1: f64, w1: f64, phi: f64) -> PyResult<Self> {
        let boundary: Boundary = boundary.parse().map_err(to_py_err)?;
        let mut inner = nonunitary_lab::ChainSpec::critical(n_cells, boundary);
        inner.v1 = v1;
        inner.w1 = w1;
        inner.phi = phi;
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Ring with the standard impurity at `x = 0`.
    #[staticmethod]
    fn ring(n_cells: usize, lam: f64) -> Self {
        Self { inner: presets::ring(n_cells, lam) }
    }

    #[staticmethod]
    fn twisted(n_cells: usize, lam: f64, phi: f64) -> Self {
        Self { inner: presets::twisted(n_cells, lam, phi) }
    }

    #[staticmethod]
    fn open(n_cells: usize, lam: f64) -> Self {
        Self { inner: presets::open(n_cells, lam) }
    }

    #[staticmethod]
    fn open_tuned(n_cells: usize, lam: f64) -> Self {
        Self { inner: presets::open_tuned(n_cells, lam) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: nonunitary_lab::ChainSpec = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Returns a copy with one more impurity.
    #[pyo3(signature = (cell, lam, diag, offdiag = None))]
    fn with_impurity(&self, cell: i64, lam: f64, diag: f64, offdiag: Option<f64>) -> PyResult<Self> {
        let imp = nonunitary_lab::ImpuritySpec::tuned(cell, lam, diag, offdiag.unwrap_or(diag));
        let inner = self.inner.clone().with_impurity(imp);
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn with_lambda(&self, lam: f64) -> Self {
        Self { inner: self.inner.with_lambda(lam) }
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.inner.n_cells
    }

    #[getter]
    fn boundary(&self) -> String {
        self.inner.boundary.to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn spec_hash(&self) -> String {
        self.inner.spec_hash()
    }

    /// Single-particle Hamiltonian as nested lists of complex numbers.
    fn hamiltonian(&self) -> PyResult<Vec<Vec<C64>>> {
        let h = build_hamiltonian(&self.inner).map_err(to_py_err)?;
        let m = h.matrix();
        Ok((0..h.dim()).map(|i| (0..h.dim()).map(|j| m[(i, j)]).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainSpec(n_cells={}, boundary={}, impurities={})",
            self.inner.n_cells,
            self.inner.boundary,
            self.inner.impurities.len()
        )
    }
}

#[pyclass(name = "FitResult", module = "nonunitary_lab")]
#[derive(Clone)]
struct PyFitResult {
    inner: scaling::FitResult,
}

#[pymethods]
impl PyFitResult {
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    #[getter]
    fn model(&self) -> String {
        self.inner.model.clone()
    }

    #[getter]
    fn residual_rms(&self) -> f64 {
        self.inner.residual_rms
    }

    #[getter]
    fn r_squared(&self) -> f64 {
        self.inner.r_squared
    }

    #[getter]
    fn n_points_used(&self) -> usize {
        self.inner.n_points_used
    }

    #[getter]
    fn coefficients(&self) -> std::collections::BTreeMap<String, f64> {
        self.inner.coefficients.clone()
    }

    fn summary(&self) -> String {
        self.inner.summary()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("FitResult({})", self.inner.summary())
    }
}

#[pyclass(name = "EntropyCurve", module = "nonunitary_lab")]
#[derive(Clone)]
struct PyEntropyCurve {
    inner: entanglement::EntropyCurve,
}

#[pymethods]
impl PyEntropyCurve {
    #[getter]
    fn l_a(&self) -> Vec<usize> {
        self.inner.samples.iter().map(|s| s.l_a).collect()
    }

    #[getter]
    fn entropy(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.value).collect()
    }

    #[getter]
    fn max_im(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.max_im).collect()
    }

    #[getter]
    fn flags(&self) -> Vec<bool> {
        self.inner.samples.iter().map(|s| s.flag).collect()
    }

    #[getter]
    fn renyi_n(&self) -> f64 {
        self.inner.renyi_n
    }

    #[getter]
    fn ep_approached(&self) -> bool {
        self.inner.ep_approached
    }

    #[pyo3(signature = (exclude_margin = scaling::DEFAULT_EXCLUDE_MARGIN))]
    fn fit(&self, exclude_margin: usize) -> PyResult<PyFitResult> {
        let inner = scaling::fit_entropy(&self.inner, self.inner.boundary.into(), exclude_margin).map_err(to_py_err)?;
        Ok(PyFitResult { inner })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<PyObject> {
        to_py(py, &self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

/// Single-particle eigenvalues sorted by real part.
#[pyfunction]
fn spectrum(spec: &PyChainSpec) -> PyResult<Vec<C64>> {
    let h = build_hamiltonian(&spec.inner).map_err(to_py_err)?;
    let mut ev = linalg::eigenvalues(h.matrix()).map_err(to_py_err)?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Ground-state diagnostics: energy, overlap condition number, phase rigidity.
#[pyfunction]
#[pyo3(signature = (spec, ep_eta = None))]
fn ground_state(py: Python<'_>, spec: &PyChainSpec, ep_eta: Option<f64>) -> PyResult<PyObject> {
    let solved = eigensys::solve_chain(&spec.inner, &solve_options(ep_eta)).map_err(to_py_err)?;
    let doc = serde_json::json!({
        "energy": solved.state.total_energy.re,
        "energy_imag": solved.state.total_energy.im,
        "overlap_cond": solved.system.overlap_cond,
        "raw_overlap_cond": solved.raw_overlap_cond,
        "min_phase_rigidity": solved.system.min_phase_rigidity(),
        "ep_approached": solved.ep_approached,
        "max_imag": solved.system.max_imag(),
    });
    to_py(py, &doc)
}

#[pyfunction]
#[pyo3(signature = (spec, renyi_n = 1.0, cut_origin = 0, ep_eta = None))]
fn entropy_profile(spec: &PyChainSpec, renyi_n: f64, cut_origin: usize, ep_eta: Option<f64>) -> PyResult<PyEntropyCurve> {
    let cuts = all_cell_cuts(spec.inner.n_cells);
    let inner = entanglement::entropy_profile_with(&spec.inner, &solve_options(ep_eta), renyi_n, cut_origin, &cuts)
        .map_err(to_py_err)?;
    Ok(PyEntropyCurve { inner })
}

/// Half-filled ground-state energies of `spec` resized to each length.
#[pyfunction]
fn energy_vs_size(spec: &PyChainSpec, sizes: Vec<usize>) -> PyResult<Vec<f64>> {
    let pts = eigensys::energy_vs_size(&spec.inner, &sizes, &SolveOptions::default()).map_err(to_py_err)?;
    Ok(pts.iter().map(|p| p.energy).collect())
}

#[pyfunction]
#[pyo3(signature = (sizes, energies, boundary = "PBC", v_fermi = scaling::DEFAULT_V_FERMI, min_size = 0))]
fn fit_energy(sizes: Vec<usize>, energies: Vec<f64>, boundary: &str, v_fermi: f64, min_size: usize) -> PyResult<PyFitResult> {
    if sizes.len() != energies.len() {
        return Err(PyValueError::new_err("sizes and energies differ in length"));
    }
    let geometry: Geometry = boundary.parse::<Boundary>().map_err(to_py_err)?.into();
    let pts: Vec<(usize, f64)> = sizes.into_iter().zip(energies).collect();
    let inner = scaling::fit_energy_window(&pts, geometry, v_fermi, min_size).map_err(to_py_err)?;
    Ok(PyFitResult { inner })
}

/// Fidelity susceptibility on `k / steps` for `k < steps`, or on explicit `lambdas`.
#[pyfunction]
#[pyo3(signature = (spec, steps = None, lambdas = None, eps = None))]
fn fidelity_susceptibility(
    py: Python<'_>,
    spec: &PyChainSpec,
    steps: Option<usize>,
    lambdas: Option<Vec<f64>>,
    eps: Option<f64>,
) -> PyResult<PyObject> {
    let (grid, default_eps) = match (lambdas, steps) {
        (Some(l), None) => (l, 1e-3),
        (None, Some(s)) if s > 0 => (lambda_grid(s), 1.0 / s as f64),
        _ => return Err(PyValueError::new_err("give exactly one of steps (> 0) or lambdas")),
    };
    let curve = fidelity::fidelity_susceptibility(&spec.inner, &grid, eps.unwrap_or(default_eps)).map_err(to_py_err)?;
    to_py(py, &curve)
}

/// Residual of the analytic zero-mode candidate; `exists` when below `tol`.
#[pyfunction]
#[pyo3(signature = (spec, tol = None))]
fn check_ep(py: Python<'_>, spec: &PyChainSpec, tol: Option<f64>) -> PyResult<PyObject> {
    let tol = match tol {
        Some(t) => t,
        None => analytic::default_tol(&spec.inner).map_err(to_py_err)?,
    };
    let r = analytic::check_ep(&spec.inner, tol).map_err(to_py_err)?;
    to_py(
        py,
        &serde_json::json!({ "residual_norm": r.residual_norm, "exists": r.exists, "tol": r.tol }),
    )
}

/// Condition number of the right eigenvector matrix.
#[pyfunction]
fn overlap_condition(spec: &PyChainSpec) -> PyResult<f64> {
    let h = build_hamiltonian(&spec.inner).map_err(to_py_err)?;
    let (_, r) = linalg::eig(h.matrix()).map_err(to_py_err)?;
    Ok(linalg::cond2(r.as_ref()))
}

#[pymodule]
#[pyo3(name = "nonunitary_lab")]
fn nonunitary_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyChainSpec>()?;
    m.add_class::<PyEntropyCurve>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_profile, m)?)?;
    m.add_function(wrap_pyfunction!(energy_vs_size, m)?)?;
    m.add_function(wrap_pyfunction!(fit_energy, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_susceptibility, m)?)?;
    m.add_function(wrap_pyfunction!(check_ep, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_condition, m)?)?;
    Ok(())
}
