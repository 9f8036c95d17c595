use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qfc_core::correlations::{self, QuantifierResult};
use qfc_core::discord::{self, DiscordResult, Method};
use qfc_core::linalg::{CMatrix, Party};
use qfc_core::optimizer::OptimizerConfig;
use qfc_core::spec::{parse_observable_spec, parse_state_spec};
use qfc_core::{fisher, verify as suite, BipartiteState, DensityMatrix};

fn err(e: qfc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be a non-empty square list of rows"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn config(restarts: usize, seed: u64, tol: f64) -> PyResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        restarts,
        seed,
        tolerance: tol,
        ..Default::default()
    };
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Bipartite density matrix on `C^M ⊗ C^N`.
#[pyclass(name = "State", frozen)]
struct PyState {
    inner: BipartiteState,
}

#[pymethods]
impl PyState {
    /// Builds a state from a JSON specification such as
    /// `{"kind": "max_entangled", "dims": [2, 2]}`.
    #[staticmethod]
    fn from_spec(spec: &str) -> PyResult<Self> {
        let inner = parse_state_spec(spec).and_then(|s| s.resolve()).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_matrix(matrix: Vec<Vec<Complex64>>, dims: (usize, usize)) -> PyResult<Self> {
        let inner = BipartiteState::from_matrix(from_rows(matrix)?, dims).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        rows(self.inner.matrix())
    }

    fn purity(&self) -> f64 {
        self.inner.density().purity()
    }

    /// Reduced state of party `"a"` or `"b"`.
    fn reduced(&self, party: &str) -> PyResult<Vec<Vec<Complex64>>> {
        let p = match party {
            "a" => Party::A,
            "b" => Party::B,
            other => return Err(PyValueError::new_err(format!("party must be 'a' or 'b', got {other:?}"))),
        };
        Ok(rows(self.inner.reduced(p).matrix()))
    }

    fn with_white_noise(&self, p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.mix_white_noise(p).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.inner.dims();
        format!("State(dims=({m}, {n}), purity={:.6})", self.inner.density().purity())
    }
}

/// Outcome of an optimized quantity.
#[pyclass(name = "Result", frozen, get_all)]
struct PyOptimized {
    value: f64,
    converged: bool,
    /// Columns are the optimal basis vectors; `None` for closed forms.
    argopt: Option<Vec<Vec<Complex64>>>,
    best_seed: Option<u64>,
    evaluations: usize,
    method: String,
}

#[pymethods]
impl PyOptimized {
    fn __repr__(&self) -> String {
        format!("Result(value={}, converged={}, method={:?})", self.value, self.converged, self.method)
    }
}

impl From<QuantifierResult> for PyOptimized {
    fn from(r: QuantifierResult) -> Self {
        Self {
            value: r.value,
            converged: r.converged(),
            argopt: Some(rows(&r.argopt.unitary())),
            best_seed: Some(r.report.seed()),
            evaluations: r.report.evaluations,
            method: "optimized".into(),
        }
    }
}

impl From<DiscordResult> for PyOptimized {
    fn from(r: DiscordResult) -> Self {
        Self {
            value: r.value,
            converged: r.converged(),
            argopt: r.argopt.as_ref().map(|m| rows(&m.unitary())),
            best_seed: r.report.as_ref().map(|x| x.seed()),
            evaluations: r.report.as_ref().map_or(0, |x| x.evaluations),
            method: match r.method {
                Method::ClosedForm => "closed_form".into(),
                Method::Optimized => "optimized".into(),
            },
        }
    }
}

/// `(qfi, variance)` of `observable` (JSON spec) on `state`.
#[pyfunction]
fn qfi(state: &PyState, observable: &str) -> PyResult<(f64, f64)> {
    let h = parse_observable_spec(observable)
        .and_then(|o| o.resolve(state.inner.dims()))
        .map_err(err)?;
    let rho = state.inner.density();
    Ok((fisher::qfi(rho, &h).map_err(err)?, fisher::variance(rho, &h).map_err(err)?))
}

/// QFI of a single (non-bipartite) density matrix.
#[pyfunction]
fn qfi_matrix(rho: Vec<Vec<Complex64>>, h: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let rho = DensityMatrix::new(from_rows(rho)?).map_err(err)?;
    let h = fisher::Observable::new(from_rows(h)?).map_err(err)?;
    fisher::qfi(&rho, &h).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, restarts = 16, seed = 0, tol = 1e-6))]
fn q_ah(state: &PyState, restarts: usize, seed: u64, tol: f64) -> PyResult<PyOptimized> {
    let cfg = config(restarts, seed, tol)?;
    Ok(correlations::q_ah(&state.inner, &cfg).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (state, restarts = 16, seed = 0, tol = 1e-6))]
fn q_api(state: &PyState, restarts: usize, seed: u64, tol: f64) -> PyResult<PyOptimized> {
    let cfg = config(restarts, seed, tol)?;
    Ok(correlations::q_api(&state.inner, &cfg).map_err(err)?.into())
}

/// `1 − Σ sᵢ²` for a pure state.
#[pyfunction]
fn q_pure(state: &PyState) -> PyResult<f64> {
    correlations::q_pure_closed_form(&state.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, restarts = 16, seed = 0, tol = 1e-6))]
fn entropic_discord(state: &PyState, restarts: usize, seed: u64, tol: f64) -> PyResult<PyOptimized> {
    let cfg = config(restarts, seed, tol)?;
    Ok(discord::entropic_discord(&state.inner, &cfg).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (state, restarts = 16, seed = 0, tol = 1e-6))]
fn geometric_discord(state: &PyState, restarts: usize, seed: u64, tol: f64) -> PyResult<PyOptimized> {
    let cfg = config(restarts, seed, tol)?;
    Ok(discord::geometric_discord(&state.inner, &cfg).map_err(err)?.into())
}

/// Runs one acceptance criterion; returns `(passed, measured, threshold, detail)`.
#[pyfunction]
#[pyo3(signature = (criterion, seed = 0))]
fn verify(criterion: u8, seed: u64) -> PyResult<(bool, f64, f64, String)> {
    let r = suite::run_criterion(criterion, seed).map_err(err)?;
    Ok((r.passed, r.measured, r.threshold, r.detail))
}

#[pymodule]
fn qfc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyOptimized>()?;
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(q_ah, m)?)?;
    m.add_function(wrap_pyfunction!(q_api, m)?)?;
    m.add_function(wrap_pyfunction!(q_pure, m)?)?;
    m.add_function(wrap_pyfunction!(entropic_discord, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_discord, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
