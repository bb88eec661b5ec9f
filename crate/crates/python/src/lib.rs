//! Python bindings. Structured results come back as plain dicts.

use contracta_core::cli::reproduce::reproduce as run_reproduction;
use contracta_core::metric;
use contracta_core::onestep::{self, SeedLabel, SystemModel};
use contracta_core::planner::{self, Strategy};
use contracta_core::polytope::{self, CSetPolytope, HPolytope};
use contracta_core::{certificate, seeds, DenseMatrix, Error};
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

/// Bad inputs raise ValueError; failures of the computation itself raise ArithmeticError.
fn err(e: Error) -> PyErr {
    match e {
        Error::LpIterationLimit(_)
        | Error::FacetLimit { .. }
        | Error::NotControllable(_)
        | Error::SeedNotContractive { .. }
        | Error::RateTooWeak(_)
        | Error::MonotonicityViolated(..)
        | Error::BudgetExceeded(_)
        | Error::Invariant(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::try_from(rows).map_err(err)
}

fn strategy(name: &str) -> PyResult<Strategy> {
    match name {
        "apriori-bound" => Ok(Strategy::AprioriBound),
        "adaptive-inclusion" => Ok(Strategy::AdaptiveInclusion),
        other => Err(PyValueError::new_err(format!(
            "unknown strategy '{other}', expected apriori-bound or adaptive-inclusion"
        ))),
    }
}

/// A bounded polytope `{x : Hx <= b}` with the origin in its interior.
#[pyclass(name = "CSet", module = "contracta", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCSet {
    inner: CSetPolytope,
}

#[pymethods]
impl PyCSet {
    #[new]
    fn new(h: Vec<Vec<f64>>, b: Vec<f64>) -> PyResult<Self> {
        let p = HPolytope::new(matrix(h)?, b).map_err(err)?;
        Ok(Self { inner: CSetPolytope::new(p).map_err(err)? })
    }

    #[staticmethod]
    fn hypercube(n: usize, r: f64) -> PyResult<Self> {
        Ok(Self { inner: CSetPolytope::hypercube(n, r).map_err(err)? })
    }

    #[staticmethod]
    fn symmetric_box(half_widths: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: CSetPolytope::symmetric_box(&half_widths).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn h(&self) -> Vec<Vec<f64>> {
        self.inner.h().to_rows()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b().to_vec()
    }

    fn num_facets(&self) -> usize {
        self.inner.num_facets()
    }

    #[pyo3(signature = (x, tol = 1e-9))]
    fn contains(&self, x: Vec<f64>, tol: f64) -> bool {
        x.len() == self.inner.dim() && self.inner.contains(&x, tol)
    }

    fn radial(&self, xi: Vec<f64>) -> PyResult<f64> {
        self.inner.radial(&xi).map_err(err)
    }

    fn support(&self, a: Vec<f64>) -> PyResult<f64> {
        self.inner.support(&a).map_err(err)
    }

    fn scale(&self, mu: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.scale(mu).map_err(err)? })
    }

    fn vertices(&self) -> PyResult<Vec<Vec<f64>>> {
        self.inner.vertices().map_err(err)
    }

    fn remove_redundancy(&self) -> PyResult<Self> {
        let p = self.inner.remove_redundancy().map_err(err)?;
        Ok(Self { inner: CSetPolytope::new(p).map_err(err)? })
    }

    fn is_subset_of(&self, other: &PyCSet) -> PyResult<bool> {
        polytope::is_subset(&self.inner, &other.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CSet(dim={}, facets={})", self.inner.dim(), self.inner.num_facets())
    }
}

/// `x⁺ = Ax + Bu` with state constraints `X` and input constraints `U`.
#[pyclass(name = "System", module = "contracta", frozen)]
struct PySystem {
    inner: SystemModel,
}

#[pymethods]
impl PySystem {
    #[new]
    fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, x: &PyCSet, u: &PyCSet) -> PyResult<Self> {
        let inner = SystemModel::new(matrix(a)?, matrix(b)?, x.inner.clone(), u.inner.clone()).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn x(&self) -> PyCSet {
        PyCSet { inner: self.inner.x().clone() }
    }

    #[getter]
    fn u(&self) -> PyCSet {
        PyCSet { inner: self.inner.u().clone() }
    }

    fn controllable(&self) -> bool {
        self.inner.controllable()
    }

    fn one_step(&self, lambda: f64, d: &PyCSet) -> PyResult<PyCSet> {
        Ok(PyCSet { inner: onestep::one_step_set(&self.inner, lambda, &d.inner).map_err(err)? })
    }

    /// `[Q_0(D), ..., Q_k(D)]`; `d` defaults to `X`.
    #[pyo3(signature = (lambda, k, d = None))]
    fn iterate(&self, lambda: f64, k: usize, d: Option<&PyCSet>) -> PyResult<Vec<PyCSet>> {
        let (seed, label) = match d {
            Some(d) => (&d.inner, SeedLabel::Arbitrary),
            None => (self.inner.x(), SeedLabel::FromX),
        };
        let seq = onestep::iterate(&self.inner, lambda, seed, k, label).map_err(err)?;
        Ok(seq.entries.into_iter().map(|inner| PyCSet { inner }).collect())
    }

    fn is_lambda_contractive(&self, lambda: f64, c: &PyCSet) -> PyResult<bool> {
        onestep::is_lambda_contractive(&self.inner, lambda, &c.inner).map_err(err)
    }

    /// Inputs and terminal point proving `x ∈ Q_{k+1}(C)`, or None.
    fn membership_certificate(
        &self,
        py: Python<'_>,
        lambda: f64,
        c: &PyCSet,
        x: Vec<f64>,
        k: usize,
    ) -> PyResult<Py<PyAny>> {
        let cert = onestep::membership_certificate(&self.inner, lambda, &c.inner, &x, k).map_err(err)?;
        to_py(py, &cert)
    }

    fn __repr__(&self) -> String {
        format!("System(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

#[pyfunction]
fn iteration_bound(eta: f64, delta: f64, d_cd: f64, n: usize) -> PyResult<usize> {
    planner::iteration_bound(eta, delta, d_cd, n).map_err(err)
}

#[pyfunction]
fn exact_k_oracle_1d(lambda: f64, epsilon: f64) -> PyResult<usize> {
    planner::exact_k_oracle_1d(lambda, epsilon).map_err(err)
}

#[pyfunction]
fn set_distance(py: Python<'_>, c: &PyCSet, d: &PyCSet) -> PyResult<Py<PyAny>> {
    to_py(py, &metric::set_distance(&c.inner, &d.inner).map_err(err)?)
}

#[pyfunction]
fn inclusion_factor(c: &PyCSet, d: &PyCSet) -> PyResult<f64> {
    metric::inclusion_factor(&c.inner, &d.inner).map_err(err)
}

#[pyfunction]
fn compute_certificate(py: Python<'_>, sys: &PySystem, lambda: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &certificate::compute_certificate(&sys.inner, lambda).map_err(err)?)
}

#[pyfunction]
fn epsilon_plan(py: Python<'_>, sys: &PySystem, lambda: f64, c: &PyCSet, epsilon: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &planner::epsilon_plan(&sys.inner, lambda, &c.inner, epsilon).map_err(err)?)
}

#[pyfunction]
fn select_lambda(py: Python<'_>, sys: &PySystem, lambda_star: f64, c: &PyCSet, mu: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &planner::select_lambda(&sys.inner, lambda_star, &c.inner, mu).map_err(err)?)
}

/// Runs the plan for `(lambda, epsilon)` and returns `(summary, terminal set)`.
#[pyfunction]
#[pyo3(signature = (sys, lambda, c, epsilon, strategy = "adaptive-inclusion"))]
fn approximate_cmax1(
    py: Python<'_>,
    sys: &PySystem,
    lambda: f64,
    c: &PyCSet,
    epsilon: f64,
    strategy: &str,
) -> PyResult<(Py<PyAny>, PyCSet)> {
    let s = self::strategy(strategy)?;
    let plan = planner::epsilon_plan(&sys.inner, lambda, &c.inner, epsilon).map_err(err)?;
    let res = planner::approximate_cmax1(&sys.inner, &plan, &c.inner, s).map_err(err)?;
    let terminal = PyCSet { inner: res.terminal.clone() };
    Ok((to_py(py, &res)?, terminal))
}

/// Seed polytope and its certified rate from an ellipsoidal invariant set.
#[pyfunction]
fn ellipsoid_seed(
    sys: &PySystem,
    k: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    beta: f64,
    lambda: f64,
) -> PyResult<(PyCSet, f64)> {
    let seed = seeds::EllipsoidSeed { k: matrix(k)?, p: matrix(p)?, beta, lambda };
    let seed = seeds::validate_ellipsoid_seed(&sys.inner, &seed).map_err(err)?;
    let (c, rate) = seeds::polytopic_inner_seed(&sys.inner, &seed).map_err(err)?;
    Ok((PyCSet { inner: c }, rate))
}

#[pyfunction]
fn reproduce(py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &run_reproduction(name).map_err(err)?.report)
}

#[pymodule]
fn contracta(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCSet>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(iteration_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exact_k_oracle_1d, m)?)?;
    m.add_function(wrap_pyfunction!(set_distance, m)?)?;
    m.add_function(wrap_pyfunction!(inclusion_factor, m)?)?;
    m.add_function(wrap_pyfunction!(compute_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_plan, m)?)?;
    m.add_function(wrap_pyfunction!(select_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(approximate_cmax1, m)?)?;
    m.add_function(wrap_pyfunction!(ellipsoid_seed, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
