use std::collections::BTreeMap;
use std::time::Duration;

use invgen_core::algdep;
use invgen_core::algebra::{Rational, TermOrder};
use invgen_core::driver::{self, Algorithm, RunConfig, RunError};
use invgen_core::engine;
use invgen_core::frontend::{parse_poly_std, LoopProgram};
use invgen_core::groebner::{normal_form, GbConfig, Ideal as CoreIdeal};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(invgen, InvgenError, PyException);
create_exception!(invgen, ParseError, InvgenError);
create_exception!(invgen, UnsupportedError, InvgenError);
create_exception!(invgen, ResourceLimitError, InvgenError);
create_exception!(invgen, OracleFailure, InvgenError);

fn to_py(e: RunError) -> PyErr {
    let msg = e.to_string();
    match e {
        RunError::Parse(_) => ParseError::new_err(msg),
        RunError::Unsupported(_) => UnsupportedError::new_err(msg),
        RunError::ResourceLimit(_) => ResourceLimitError::new_err(msg),
        RunError::OracleFailure(_) => OracleFailure::new_err(msg),
        _ => InvgenError::new_err(msg),
    }
}

fn gb() -> GbConfig {
    GbConfig::default()
}

/// A loop `(B1*; ...; Br*)*` after path normalization.
#[pyclass(frozen)]
struct Loop {
    inner: LoopProgram,
}

#[pymethods]
impl Loop {
    #[staticmethod]
    fn parse(source: &str) -> PyResult<Loop> {
        LoopProgram::parse(source).map(|inner| Loop { inner }).map_err(|e| to_py(e.into()))
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.vars.iter().map(|v| v.to_string()).collect()
    }

    #[getter]
    fn params(&self) -> Vec<String> {
        self.inner.params.iter().map(|v| v.to_string()).collect()
    }

    #[getter]
    fn branches(&self) -> usize {
        self.inner.bodies.len()
    }

    /// Invariant ideal; `algorithm` is "fixpoint" or "unrolled".
    #[pyo3(signature = (algorithm = "fixpoint", pair_budget = None, timeout = None))]
    fn invariants(
        &self,
        py: Python<'_>,
        algorithm: &str,
        pair_budget: Option<usize>,
        timeout: Option<f64>,
    ) -> PyResult<Invariants> {
        let algorithm: Algorithm = algorithm.parse().map_err(PyValueError::new_err)?;
        let mut cfg = RunConfig { algorithm, timings: false, ..RunConfig::default() };
        if let Some(b) = pair_budget {
            cfg.pair_budget = b;
        }
        cfg.timeout = timeout.map(Duration::from_secs_f64);
        let report = py.detach(|| driver::run_program("loop", &self.inner, &cfg, Duration::ZERO)).map_err(to_py)?;
        Ok(Invariants { iterations: report.iterations, ideal: Ideal { inner: report.ideal } })
    }

    /// Number of violated generators over `trials` random executions.
    #[pyo3(signature = (ideal, trials = 100, seed = driver::DEFAULT_SEED))]
    fn oracle_violations(&self, ideal: &Ideal, trials: usize, seed: u64) -> usize {
        driver::oracle_check(&self.inner, &ideal.inner, trials, seed).violations.len()
    }

    fn __repr__(&self) -> String {
        format!("Loop(variables={:?}, branches={})", self.variables(), self.branches())
    }
}

/// Polynomial ideal over final values `x`, initial values `x_0` and parameters.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Ideal {
    inner: CoreIdeal,
}

#[pymethods]
impl Ideal {
    #[new]
    #[pyo3(signature = (generators, params = Vec::new()))]
    fn new(generators: Vec<String>, params: Vec<String>) -> PyResult<Ideal> {
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let gens = generators
            .iter()
            .map(|g| parse_poly_std(g, &params).map_err(|e| ParseError::new_err(e.to_string())))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Ideal { inner: CoreIdeal::new(gens) })
    }

    /// Reduced basis as canonical strings.
    fn generators(&self) -> PyResult<Vec<String>> {
        driver::generator_strings(&self.inner, &gb()).map_err(|e| ResourceLimitError::new_err(e.to_string()))
    }

    #[pyo3(signature = (poly, params = Vec::new()))]
    fn contains(&self, poly: &str, params: Vec<String>) -> PyResult<bool> {
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let p = parse_poly_std(poly, &params).map_err(|e| ParseError::new_err(e.to_string()))?;
        let order = TermOrder::degrevlex();
        let basis = self.inner.basis(&order, &gb()).map_err(|e| ResourceLimitError::new_err(e.to_string()))?;
        Ok(normal_form(&p, &basis, &order).is_zero())
    }

    fn equals(&self, other: &Ideal) -> PyResult<bool> {
        invgen_core::groebner::ideal_equal(&self.inner, &other.inner, &TermOrder::degrevlex(), &gb())
            .map_err(|e| ResourceLimitError::new_err(e.to_string()))
    }

    /// Substitutes initial values, e.g. `{"a": "x", "p": "1"}` with `params=["x"]`.
    #[pyo3(signature = (init, params = Vec::new()))]
    fn instantiate(&self, init: BTreeMap<String, String>, params: Vec<String>) -> PyResult<Ideal> {
        let params: Vec<&str> = params.iter().map(String::as_str).collect();
        let pairs: Vec<(&str, &str)> = init.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let init = driver::initial_values(&pairs, &params).map_err(|e| ParseError::new_err(e.to_string()))?;
        engine::instantiate(&self.inner, &init, &gb())
            .map(|inner| Ideal { inner })
            .map_err(|e| ResourceLimitError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("Ideal({})", self.generators()?.join(", ")))
    }
}

#[pyclass(frozen, get_all)]
struct Invariants {
    iterations: usize,
    ideal: Ideal,
}

/// Runs a `.loop` file and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (path, algorithm = "fixpoint", oracle = 0, seed = driver::DEFAULT_SEED))]
fn run(py: Python<'_>, path: &str, algorithm: &str, oracle: usize, seed: u64) -> PyResult<String> {
    let algorithm: Algorithm = algorithm.parse().map_err(PyValueError::new_err)?;
    let cfg = RunConfig { algorithm, oracle_trials: oracle, seed, timings: false, ..RunConfig::default() };
    py.detach(|| driver::run_file(std::path::Path::new(path), &cfg)).map(|r| r.to_json()).map_err(to_py)
}

/// Generators of the ideal of algebraic relations among `theta_k^n`, written `yk_0`.
#[pyfunction]
fn dependency_ideal(theta: Vec<String>) -> PyResult<Vec<String>> {
    let theta = theta
        .iter()
        .map(|t| t.parse::<Rational>().map_err(|e| PyValueError::new_err(format!("{t}: {e}"))))
        .collect::<PyResult<Vec<_>>>()?;
    let ideal = algdep::dependency_ideal(&theta, 0, &gb()).map_err(|e| ResourceLimitError::new_err(e.to_string()))?;
    let gens = driver::generator_strings(&ideal, &gb()).map_err(|e| ResourceLimitError::new_err(e.to_string()))?;
    Ok(gens)
}

#[pymodule]
fn invgen(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Loop>()?;
    m.add_class::<Ideal>()?;
    m.add_class::<Invariants>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(dependency_ideal, m)?)?;
    let py = m.py();
    m.add("InvgenError", py.get_type::<InvgenError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("UnsupportedError", py.get_type::<UnsupportedError>())?;
    m.add("ResourceLimitError", py.get_type::<ResourceLimitError>())?;
    m.add("OracleFailure", py.get_type::<OracleFailure>())?;
    Ok(())
}
