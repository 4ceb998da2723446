//! Python bindings for `lengthforge`.
//!
//! Integers cross the boundary as Python `int`, rationals as
//! `fractions.Fraction`. Every function that enumerates takes an optional
//! `budget`; running out raises `BudgetExceededError`.

use std::collections::{BTreeMap, BTreeSet};

use lengthforge::construct::{self, RealizationTrace, Realizer, DEFAULT_MAX_LEVEL};
use lengthforge::engine::{self, DEFAULT_BUDGET};
use lengthforge::{arith, cli, verify, Engine, Error, ExactRational, SquarefreeMode, VerificationReport};
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(lengthforge_py, BudgetExceededError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetExceededError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn engine(budget: Option<u64>) -> Engine {
    Engine::with_budget(budget.unwrap_or(DEFAULT_BUDGET))
}

fn fraction<'py>(py: Python<'py>, q: &ExactRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((q.numer().clone(), q.denom().clone()))
}

fn fractions<'py>(py: Python<'py>, qs: &[ExactRational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    qs.iter().map(|q| fraction(py, q)).collect()
}

/// Any iterable of non-negative ints.
fn u64_set(values: &Bound<'_, PyAny>) -> PyResult<BTreeSet<u64>> {
    values.try_iter()?.map(|v| v?.extract::<u64>()).collect()
}

fn mode(name: &str) -> PyResult<SquarefreeMode> {
    name.parse().map_err(py_err)
}

/// A realization: the monoids, the target element and the per-level steps.
#[pyclass(name = "RealizationTrace", module = "lengthforge_py", frozen)]
struct PyTrace {
    inner: RealizationTrace,
}

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        RealizationTrace::from_json(text).map(|inner| PyTrace { inner }).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn gap(&self) -> String {
        cli::gap_export(&self.inner)
    }

    #[getter]
    fn lengths(&self) -> Vec<u64> {
        self.inner.lengths.iter().copied().collect()
    }

    #[getter]
    fn counts(&self) -> BTreeMap<u64, u64> {
        self.inner.counts.clone()
    }

    #[getter]
    fn target(&self) -> BigInt {
        self.inner.target.clone()
    }

    #[getter]
    fn scale(&self) -> BigInt {
        self.inner.scale.clone()
    }

    #[getter]
    fn normalization_gcd(&self) -> BigInt {
        self.inner.normalization_gcd.clone()
    }

    #[getter]
    fn numerical_generators(&self) -> Vec<BigInt> {
        self.inner.numerical_generators.clone()
    }

    #[getter]
    fn puiseux_generators<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &self.inner.puiseux_generators)
    }

    #[getter]
    fn primes(&self) -> Vec<BigInt> {
        self.inner.primes()
    }

    /// Levels in construction order, one per step.
    #[getter]
    fn levels(&self) -> Vec<u64> {
        self.inner.steps.iter().map(|s| s.k).collect()
    }

    /// Atoms added at step `i`, in coefficient order.
    fn step_atoms<'py>(&self, py: Python<'py>, i: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let step = self
            .inner
            .steps
            .get(i)
            .ok_or_else(|| PyValueError::new_err(format!("no step {i}")))?;
        fractions(py, &step.atoms)
    }

    fn numerical_monoid(&self) -> PyResult<PyNumericalMonoid> {
        self.inner.numerical().map(|inner| PyNumericalMonoid { inner }).map_err(py_err)
    }

    #[pyo3(signature = (budget = None))]
    fn verify(&self, py: Python<'_>, budget: Option<u64>) -> PyReport {
        let trace = &self.inner;
        let inner = py.detach(|| verify::verify_realization(&engine(budget), trace));
        PyReport { inner }
    }

    #[pyo3(signature = (budget = None))]
    fn delta(&self, budget: Option<u64>) -> PyResult<Vec<u64>> {
        verify::delta_of_target(&engine(budget), &self.inner)
            .map(|d| d.0.into_iter().collect())
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "RealizationTrace(lengths={:?}, counts={:?}, target={})",
            self.lengths(),
            self.inner.counts,
            self.inner.target
        )
    }
}

/// Outcome of re-verifying a trace.
#[pyclass(name = "VerificationReport", module = "lengthforge_py", frozen)]
struct PyReport {
    inner: VerificationReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    #[getter]
    fn lengths_ok(&self) -> bool {
        self.inner.lengths_ok
    }

    #[getter]
    fn counts_ok(&self) -> bool {
        self.inner.counts_ok
    }

    #[getter]
    fn squarefree_paper_literal(&self) -> bool {
        self.inner.squarefree_paper_literal
    }

    #[getter]
    fn squarefree_strong(&self) -> bool {
        self.inner.squarefree_strong
    }

    #[getter]
    fn atoms_ok(&self) -> bool {
        self.inner.atoms_ok
    }

    #[getter]
    fn step_bijection_ok(&self) -> bool {
        self.inner.step_bijection_ok
    }

    #[getter]
    fn scaling_consistency_ok(&self) -> bool {
        self.inner.scaling_consistency_ok
    }

    /// `(check, passed, message)` for every check run.
    #[getter]
    fn details(&self) -> Vec<(&'static str, bool, String)> {
        self.inner
            .details
            .iter()
            .map(|d| (d.check, d.passed, d.message.clone()))
            .collect()
    }

    fn failures(&self) -> Vec<&'static str> {
        self.inner.failures()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __bool__(&self) -> bool {
        self.inner.passed
    }

    fn __repr__(&self) -> String {
        format!("VerificationReport(passed={}, failures={:?})", self.inner.passed, self.inner.failures())
    }
}

/// Numerical monoid given by its minimal generating set.
#[pyclass(name = "NumericalMonoid", module = "lengthforge_py", frozen)]
struct PyNumericalMonoid {
    inner: lengthforge::NumericalMonoid,
}

#[pymethods]
impl PyNumericalMonoid {
    /// Strict constructor: the generators must be coprime and minimal.
    #[new]
    fn new(generators: Vec<BigInt>) -> PyResult<Self> {
        lengthforge::NumericalMonoid::new(generators)
            .map(|inner| PyNumericalMonoid { inner })
            .map_err(py_err)
    }

    /// Monoid generated by an arbitrary coprime list, reduced to its atoms.
    #[staticmethod]
    fn generated_by(generators: Vec<BigInt>) -> PyResult<Self> {
        lengthforge::NumericalMonoid::generated_by(generators)
            .map(|inner| PyNumericalMonoid { inner })
            .map_err(py_err)
    }

    #[getter]
    fn generators(&self) -> Vec<BigInt> {
        self.inner.generators().to_vec()
    }

    #[getter]
    fn multiplicity(&self) -> BigInt {
        self.inner.multiplicity().clone()
    }

    #[pyo3(signature = (x, budget = None))]
    fn contains(&self, x: BigInt, budget: Option<u64>) -> PyResult<bool> {
        engine(budget).member_q(&self.inner, &x).map_err(py_err)
    }

    fn __contains__(&self, x: BigInt) -> PyResult<bool> {
        self.contains(x, None)
    }

    /// Exponent vectors of all factorizations of `a`, sorted.
    #[pyo3(signature = (a, budget = None))]
    fn factorizations(&self, py: Python<'_>, a: BigInt, budget: Option<u64>) -> PyResult<Vec<Vec<u64>>> {
        let m = &self.inner;
        let z = py.detach(|| engine(budget).factorizations(m, &a)).map_err(py_err)?;
        Ok(z.vectors.into_iter().map(|v| v.0).collect())
    }

    /// Map from length to the number of factorizations of that length.
    #[pyo3(signature = (a, budget = None))]
    fn length_profile(&self, py: Python<'_>, a: BigInt, budget: Option<u64>) -> PyResult<BTreeMap<u64, u64>> {
        let m = &self.inner;
        let z = py.detach(|| engine(budget).factorizations(m, &a)).map_err(py_err)?;
        Ok(z.length_profile().counts)
    }

    #[pyo3(signature = (a, budget = None))]
    fn lengths(&self, py: Python<'_>, a: BigInt, budget: Option<u64>) -> PyResult<Vec<u64>> {
        Ok(self.length_profile(py, a, budget)?.into_keys().collect())
    }

    #[pyo3(signature = (a, budget = None))]
    fn delta(&self, py: Python<'_>, a: BigInt, budget: Option<u64>) -> PyResult<Vec<u64>> {
        let lengths: BTreeSet<u64> = self.lengths(py, a, budget)?.into_iter().collect();
        Ok(engine::delta_set(&lengths).0.into_iter().collect())
    }

    /// `mode` is `"paper-literal"` (default) or `"strong"`.
    #[pyo3(signature = (a, mode = "paper-literal", budget = None))]
    fn is_squarefree(&self, a: BigInt, mode: &str, budget: Option<u64>) -> PyResult<bool> {
        let mode = self::mode(mode)?;
        engine(budget).squarefree_q(&self.inner, &a, mode).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let gens: Vec<String> = self.inner.generators().iter().map(BigInt::to_string).collect();
        format!("NumericalMonoid([{}])", gens.join(", "))
    }
}

/// Realize `counts` (length -> number of factorizations of that length).
#[pyfunction]
#[pyo3(signature = (counts, max_level = DEFAULT_MAX_LEVEL, budget = None))]
fn realize(py: Python<'_>, counts: BTreeMap<u64, u64>, max_level: u64, budget: Option<u64>) -> PyResult<PyTrace> {
    let lengths: BTreeSet<u64> = counts.keys().copied().collect();
    py.detach(|| Realizer::new(engine(budget), max_level).realize(&lengths, &counts))
        .map(|inner| PyTrace { inner })
        .map_err(py_err)
}

/// Realize an element whose length set has exactly the given distances.
#[pyfunction]
#[pyo3(signature = (distances, max_level = DEFAULT_MAX_LEVEL, budget = None))]
fn realize_delta(
    py: Python<'_>,
    distances: &Bound<'_, PyAny>,
    max_level: u64,
    budget: Option<u64>,
) -> PyResult<PyTrace> {
    let distances = u64_set(distances)?;
    py.detach(|| Realizer::new(engine(budget), max_level).realize_delta_superset(&distances))
        .map(|inner| PyTrace { inner })
        .map_err(py_err)
}

#[pyfunction]
fn is_prime(n: BigInt) -> bool {
    arith::is_prime(&n)
}

/// Smallest prime above `lower` that does not divide `forbidden`.
#[pyfunction]
#[pyo3(signature = (lower, forbidden = BigInt::from(1)))]
fn next_qualifying_prime(lower: BigInt, forbidden: BigInt) -> PyResult<BigInt> {
    arith::next_qualifying_prime(&lower, &forbidden).map_err(py_err)
}

#[pyfunction]
fn coefficients(k: u64) -> PyResult<Vec<BigInt>> {
    construct::coefficients(k).map(|c| c.coefficients).map_err(py_err)
}

#[pyfunction]
fn level_bound(k: u64) -> BigInt {
    construct::level_bound(k)
}

#[pyfunction]
fn level_atoms<'py>(py: Python<'py>, k: u64, p: BigInt) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let atoms = construct::level_atoms(k, &p).map_err(py_err)?;
    fractions(py, &atoms)
}

/// Brute-force check of the level-`k` sign trichotomy for prime `p`.
#[pyfunction]
fn trichotomy_check(k: u64, p: BigInt) -> PyResult<bool> {
    let c = construct::coefficients(k).map_err(py_err)?;
    verify::trichotomy_check(k, &c, &p).map_err(py_err)
}

#[pyfunction]
fn delta_set(values: &Bound<'_, PyAny>) -> PyResult<Vec<u64>> {
    Ok(engine::delta_set(&u64_set(values)?).0.into_iter().collect())
}

#[pymodule]
pub fn lengthforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetExceededError", m.py().get_type::<BudgetExceededError>())?;
    m.add("DEFAULT_BUDGET", DEFAULT_BUDGET)?;
    m.add("DEFAULT_MAX_LEVEL", DEFAULT_MAX_LEVEL)?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyNumericalMonoid>()?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(realize_delta, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(next_qualifying_prime, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(level_bound, m)?)?;
    m.add_function(wrap_pyfunction!(level_atoms, m)?)?;
    m.add_function(wrap_pyfunction!(trichotomy_check, m)?)?;
    m.add_function(wrap_pyfunction!(delta_set, m)?)?;
    Ok(())
}
