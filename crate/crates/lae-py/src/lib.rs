//! Python bindings: the solver's main types and operations as a small
//! extension module. Build with `cargo build -p lae-py` and import the
//! resulting cdylib as `lae_py` (see python/smoke_test.py), or use maturin.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lae::ilc::{self, LtiPlant};
use lae::lalg::{Matrix, Vector};
use lae::oracle;
use lae::solver::{Certificate, Gain, LaeProblem, NilpotentKind, Solvability, SolverConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector_from(values: Vec<f64>) -> PyResult<Vector> {
    Vector::new(values).map_err(value_err)
}

fn rows_to_vectors(rows: Vec<Vec<f64>>) -> PyResult<Vec<Vector>> {
    rows.into_iter().map(vector_from).collect()
}

fn vectors_to_rows(vectors: &[Vector]) -> Vec<Vec<f64>> {
    vectors.iter().map(|v| v.entries().to_vec()).collect()
}

/// Dense row-major matrix of floats.
#[pyclass(name = "Matrix")]
#[derive(Clone)]
struct PyMatrix {
    inner: Matrix,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: Matrix::from_rows(&rows).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyMatrix {
            inner: Matrix::identity(n),
        }
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn tolist(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows())
            .map(|i| {
                (0..self.inner.cols())
                    .map(|j| self.inner.get(i, j))
                    .collect()
            })
            .collect()
    }

    fn transpose(&self) -> Self {
        PyMatrix {
            inner: self.inner.transpose(),
        }
    }

    fn matmul(&self, other: &PyMatrix) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: self.inner.matmul(&other.inner).map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

/// A linear algebraic equation `Y_d = G·U_d` with its rank facts.
#[pyclass(name = "Problem")]
struct PyProblem {
    inner: LaeProblem,
}

#[pymethods]
impl PyProblem {
    #[new]
    fn new(g: &PyMatrix, y_d: Vec<f64>) -> PyResult<Self> {
        Ok(PyProblem {
            inner: LaeProblem::new(g.inner.clone(), vector_from(y_d)?).map_err(value_err)?,
        })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn solvable(&self) -> bool {
        self.inner.classify_solvability() == Solvability::Solvable
    }

    fn projected_target(&self) -> Vec<f64> {
        self.inner.projected_target().entries().to_vec()
    }

    /// `F = σ·Gᵀ`; σ defaults to `1/tr(G·Gᵀ)`.
    #[pyo3(signature = (sigma=None))]
    fn sigma_gain(&self, sigma: Option<f64>) -> PyResult<PyGain> {
        Ok(PyGain {
            inner: self.inner.sigma_gain(sigma).map_err(value_err)?,
        })
    }

    /// Deadbeat gain; `kind` is "zero" (one step) or "shift" (rank steps).
    fn deadbeat_gain(&self, kind: &str) -> PyResult<PyGain> {
        let kind = match kind {
            "zero" => NilpotentKind::Zero,
            "shift" => NilpotentKind::Shift,
            other => {
                return Err(value_err(format!(
                    "kind must be 'zero' or 'shift', got '{other}'"
                )))
            }
        };
        Ok(PyGain {
            inner: self.inner.deadbeat_gain(kind).map_err(value_err)?,
        })
    }

    fn validate_gain(&self, f: &PyMatrix) -> PyResult<PyGain> {
        Ok(PyGain {
            inner: self
                .inner
                .validate_gain(f.inner.clone())
                .map_err(value_err)?,
        })
    }

    fn iterate_once(&self, f: &PyMatrix, u: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self
            .inner
            .iterate_once(&f.inner, &vector_from(u)?)
            .map_err(value_err)?
            .entries()
            .to_vec())
    }

    #[pyo3(signature = (gain, epsilon=1e-5, residual_epsilon=1e-3, max_iters=1_000_000, u0=None, record_trace=false))]
    fn solve(
        &self,
        gain: &PyGain,
        epsilon: f64,
        residual_epsilon: f64,
        max_iters: usize,
        u0: Option<Vec<f64>>,
        record_trace: bool,
    ) -> PyResult<PySolveOutcome> {
        let config = SolverConfig {
            epsilon,
            residual_epsilon,
            max_iters,
            u0: u0.map(vector_from).transpose()?,
            record_trace,
        };
        let outcome = self.inner.solve(&gain.inner, &config).map_err(value_err)?;
        Ok(PySolveOutcome { inner: outcome })
    }

    fn solution_set(&self, gain: &PyGain) -> PyResult<PySolutionSet> {
        let set = self.inner.solution_set(&gain.inner).map_err(value_err)?;
        Ok(PySolutionSet {
            particular: set.particular.entries().to_vec(),
            null_basis: vectors_to_rows(&set.null_basis),
            null_projector: PyMatrix {
                inner: set.null_projector,
            },
            is_least_squares: set.is_least_squares,
        })
    }
}

/// Validated gain with property-(P) flag and convergence certificate.
#[pyclass(name = "Gain")]
struct PyGain {
    inner: Gain,
}

#[pymethods]
impl PyGain {
    #[getter]
    fn property_p(&self) -> bool {
        self.inner.property_p()
    }

    #[getter]
    fn certificate(&self) -> String {
        self.inner.certificate().to_string()
    }

    /// Nilpotency degree when the certificate is deadbeat, else None.
    #[getter]
    fn nilpotency(&self) -> Option<usize> {
        match self.inner.certificate() {
            Certificate::Nilpotent(nu) => Some(nu),
            _ => None,
        }
    }

    fn matrix(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.matrix().clone(),
        }
    }
}

#[pyclass(name = "SolveOutcome")]
struct PySolveOutcome {
    inner: lae::solver::SolveOutcome,
}

#[pymethods]
impl PySolveOutcome {
    #[getter]
    fn u_inf(&self) -> Vec<f64> {
        self.inner.u_inf.entries().to_vec()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn final_step_norm(&self) -> f64 {
        self.inner.final_step_norm
    }

    #[getter]
    fn final_residual(&self) -> f64 {
        self.inner.final_residual
    }

    #[getter]
    fn solvable(&self) -> bool {
        self.inner.solvability == Solvability::Solvable
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    /// Trace rows `(k, step_norm, residual_norm)` when recorded.
    fn trace(&self) -> Option<Vec<(usize, f64, f64)>> {
        self.inner.trace.as_ref().map(|t| {
            t.rows
                .iter()
                .map(|r| (r.k, r.step_norm, r.residual_norm))
                .collect()
        })
    }
}

#[pyclass(name = "SolutionSet")]
struct PySolutionSet {
    #[pyo3(get)]
    particular: Vec<f64>,
    #[pyo3(get)]
    null_basis: Vec<Vec<f64>>,
    #[pyo3(get)]
    is_least_squares: bool,
    null_projector: PyMatrix,
}

#[pymethods]
impl PySolutionSet {
    fn projector(&self) -> PyMatrix {
        self.null_projector.clone()
    }
}

/// Discrete-time LTI plant over a finite horizon.
#[pyclass(name = "Plant")]
struct PyPlant {
    inner: LtiPlant,
}

#[pymethods]
impl PyPlant {
    #[new]
    #[pyo3(signature = (a, b, c, x0, horizon, w=None, v=None))]
    fn new(
        a: &PyMatrix,
        b: &PyMatrix,
        c: &PyMatrix,
        x0: Vec<f64>,
        horizon: usize,
        w: Option<Vec<Vec<f64>>>,
        v: Option<Vec<Vec<f64>>>,
    ) -> PyResult<Self> {
        let mut plant = LtiPlant::new(
            a.inner.clone(),
            b.inner.clone(),
            c.inner.clone(),
            vector_from(x0)?,
            horizon,
        )
        .map_err(value_err)?;
        if w.is_some() || v.is_some() {
            plant = plant.with_disturbances(
                rows_to_vectors(w.unwrap_or_default())?,
                rows_to_vectors(v.unwrap_or_default())?,
            );
        }
        Ok(PyPlant { inner: plant })
    }

    fn relative_degree(&self) -> PyResult<usize> {
        self.inner.relative_degree().map_err(value_err)
    }

    /// Output samples over the window `t = r … r+N−1` for one trial.
    fn simulate(&self, u: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let outputs = self
            .inner
            .simulate_time_domain(&rows_to_vectors(u)?)
            .map_err(value_err)?;
        Ok(vectors_to_rows(&outputs))
    }

    /// Lifted supervector matrix `G` of the plant for a horizon reference.
    fn lifted_matrix(&self, y_d: Vec<Vec<f64>>) -> PyResult<PyMatrix> {
        let lifted = self.inner.lift(&rows_to_vectors(y_d)?).map_err(value_err)?;
        Ok(PyMatrix { inner: lifted.g })
    }

    /// Runs the learning law and returns per-iteration tracking errors with
    /// the final input trajectory.
    fn run_ilc(
        &self,
        y_d: Vec<Vec<f64>>,
        f: &PyMatrix,
        u0: Vec<Vec<f64>>,
        iters: usize,
    ) -> PyResult<PyIlcRun> {
        let run = self
            .inner
            .run_ilc(
                &rows_to_vectors(y_d)?,
                &f.inner,
                &rows_to_vectors(u0)?,
                iters,
            )
            .map_err(value_err)?;
        let n = self.inner.horizon();
        let n_i = self.inner.input_dim();
        let last = run.inputs.last().expect("at least the initial input");
        let final_input = (0..n)
            .map(|t| (0..n_i).map(|i| last.get(t * n_i + i)).collect())
            .collect();
        Ok(PyIlcRun {
            tracking_errors: run.tracking_errors,
            iterations: run.iterations,
            final_input,
        })
    }
}

#[pyclass(name = "IlcRun")]
struct PyIlcRun {
    #[pyo3(get)]
    tracking_errors: Vec<f64>,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    final_input: Vec<Vec<f64>>,
}

/// Minimum-norm least-squares solution by the ridge-ladder oracle.
#[pyfunction]
fn min_norm_least_squares(g: &PyMatrix, y: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
    let result = oracle::min_norm_least_squares(&g.inner, &vector_from(y)?).map_err(value_err)?;
    Ok((result.solution.entries().to_vec(), result.residual))
}

/// Probes whether a candidate already minimizes the residual norm.
#[pyfunction]
fn residual_is_minimal(
    g: &PyMatrix,
    y: Vec<f64>,
    candidate: Vec<f64>,
    trials: usize,
) -> PyResult<bool> {
    Ok(oracle::residual_is_minimal(
        &g.inner,
        &vector_from(y)?,
        &vector_from(candidate)?,
        trials,
    ))
}

/// Block-diagonal lift `I_N ⊗ F₀` of a per-step learning gain.
#[pyfunction]
fn ptype_gain(f0: &PyMatrix, n: usize) -> PyMatrix {
    PyMatrix {
        inner: ilc::ptype_gain(&f0.inner, n),
    }
}

/// The built-in tracking demo: an unstable chain plant with sinusoidal
/// disturbances and reference over 30 steps. Returns (plant, reference).
#[pyfunction]
fn demo_tracking_plant() -> (PyPlant, Vec<Vec<f64>>) {
    let (plant, y_d) = ilc::example_plant();
    (PyPlant { inner: plant }, vectors_to_rows(&y_d))
}

#[pymodule]
fn lae_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyGain>()?;
    m.add_class::<PySolveOutcome>()?;
    m.add_class::<PySolutionSet>()?;
    m.add_class::<PyPlant>()?;
    m.add_class::<PyIlcRun>()?;
    m.add_function(wrap_pyfunction!(min_norm_least_squares, m)?)?;
    m.add_function(wrap_pyfunction!(residual_is_minimal, m)?)?;
    m.add_function(wrap_pyfunction!(ptype_gain, m)?)?;
    m.add_function(wrap_pyfunction!(demo_tracking_plant, m)?)?;
    Ok(())
}
