//! Python bindings: code parameters, distribution matrices, cycle counting,
//! distribution design, greedy relocation and the bundled reference cases.
//!
//! Matrices cross the boundary as lists of integer rows; structured results
//! come back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use mdsc::cycles::{count_lifted_cycles, md_census};
use mdsc::fixtures::{verify_case, FixtureManifest};
use mdsc::flao::{fl_ao, FlaoConfig};
use mdsc::grade::{forecast, grade_1d, md_grade, GradeConfig, Objective, ProbDistMatrix};
use mdsc::{build_sc_matrix, CodeParams, LiftingMatrix, PartitioningMatrix, RelocationMatrix};

fn err(e: mdsc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn objective(name: &str) -> PyResult<Objective> {
    name.parse().map_err(|e: mdsc::Error| err(e))
}

/// Parameters `(gamma, kappa, z, L, m, M)` of an MD-SC code family.
#[pyclass(name = "CodeParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyCodeParams {
    inner: CodeParams,
}

#[pymethods]
impl PyCodeParams {
    #[new]
    #[pyo3(signature = (gamma, kappa, z, coupling_len, memory, copies = 1))]
    fn new(gamma: usize, kappa: usize, z: usize, coupling_len: usize, memory: usize, copies: usize) -> PyResult<Self> {
        CodeParams::new(gamma, kappa, z, coupling_len, memory, copies)
            .map(|inner| PyCodeParams { inner })
            .map_err(err)
    }

    #[getter]
    fn gamma(&self) -> usize {
        self.inner.gamma
    }

    #[getter]
    fn kappa(&self) -> usize {
        self.inner.kappa
    }

    #[getter]
    fn z(&self) -> usize {
        self.inner.z
    }

    #[getter]
    fn coupling_len(&self) -> usize {
        self.inner.coupling_len
    }

    #[getter]
    fn memory(&self) -> usize {
        self.inner.memory
    }

    #[getter]
    fn copies(&self) -> usize {
        self.inner.copies
    }

    /// Code length in bits.
    #[getter]
    fn length(&self) -> usize {
        self.inner.md_length()
    }

    #[getter]
    fn design_rate(&self) -> f64 {
        self.inner.design_rate()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "CodeParams(gamma={}, kappa={}, z={}, coupling_len={}, memory={}, copies={})",
            p.gamma, p.kappa, p.z, p.coupling_len, p.memory, p.copies
        )
    }
}

/// Joint distribution of circulants over (component, copy).
#[pyclass(name = "DistMatrix", frozen, from_py_object)]
#[derive(Clone)]
struct PyDistMatrix {
    inner: ProbDistMatrix,
}

#[pymethods]
impl PyDistMatrix {
    /// Builds from non-negative weights; rows become the component shares
    /// after rescaling to total mass one.
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        ProbDistMatrix::from_weights(&rows).map(|inner| PyDistMatrix { inner }).map_err(err)
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.to_rows()
    }

    /// Percentage of relocated circulants.
    fn relocation_percent(&self) -> f64 {
        self.inner.relocation_percent()
    }

    /// Relocated percentage within each component.
    fn component_relocation(&self) -> Vec<f64> {
        self.inner.component_relocation()
    }

    #[pyo3(signature = (params, objective = "cycle8"))]
    fn forecast<'py>(&self, py: Python<'py>, params: &PyCodeParams, objective: &str) -> PyResult<Bound<'py, PyAny>> {
        let f = forecast(&self.inner, &params.inner, self::objective(objective)?, false).map_err(err)?;
        to_py(py, &f)
    }
}

/// Number of cycles of length `cycle_length` of the SC code, or of the
/// MD-SC code when `relocation` is given.
#[pyfunction]
#[pyo3(signature = (params, partitioning, lifting, cycle_length, relocation = None))]
fn count_cycles(
    params: &PyCodeParams,
    partitioning: Vec<Vec<u32>>,
    lifting: Vec<Vec<u32>>,
    cycle_length: usize,
    relocation: Option<Vec<Vec<u32>>>,
) -> PyResult<u64> {
    let p = &params.inner;
    let k = PartitioningMatrix::from_rows(partitioning, p).map_err(err)?;
    let l = LiftingMatrix::from_rows(lifting, p).map_err(err)?;
    let g = cycle_length / 2;
    let census = match relocation {
        Some(rows) => {
            let r = RelocationMatrix::from_rows(rows, p).map_err(err)?;
            md_census(&k, &l, &r, p, g)
        }
        None => build_sc_matrix(&k, &l, p).and_then(|h| count_lifted_cycles(&h, g)),
    };
    census.map(|c| c.total).map_err(err)
}

/// SC distribution `p_star` and MD distribution from gradient descent.
#[pyfunction]
#[pyo3(signature = (params, objective = "cycle8", density = 50.0, alpha = 0.02, eps = 1e-8, seed = 0))]
fn grade<'py>(
    py: Python<'py>,
    params: &PyCodeParams,
    objective: &str,
    density: f64,
    alpha: f64,
    eps: f64,
    seed: u64,
) -> PyResult<(Vec<f64>, PyDistMatrix, Bound<'py, PyAny>)> {
    let cfg = GradeConfig {
        objective: self::objective(objective)?,
        density_cap: density,
        alpha,
        epsilon: eps,
        seed,
        ..GradeConfig::default()
    };
    let p_star = grade_1d(&params.inner, &cfg).map_err(err)?;
    let out = md_grade(&params.inner, &p_star, &cfg).map_err(err)?;
    let summary = to_py(py, &out)?;
    Ok((p_star, PyDistMatrix { inner: out.distribution }, summary))
}

/// Greedy relocation seeded from `dist`; returns the result as a dict.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (params, partitioning, lifting, dist, cycle_length = 8, seed = 0, rb = None))]
fn flao<'py>(
    py: Python<'py>,
    params: &PyCodeParams,
    partitioning: Vec<Vec<u32>>,
    lifting: Vec<Vec<u32>>,
    dist: &PyDistMatrix,
    cycle_length: usize,
    seed: u64,
    rb: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = &params.inner;
    let k = PartitioningMatrix::from_rows(partitioning, p).map_err(err)?;
    let l = LiftingMatrix::from_rows(lifting, p).map_err(err)?;
    let mut cfg = FlaoConfig::for_params(p, cycle_length);
    cfg.seed = seed;
    if let Some(rb) = rb {
        cfg.relocation_bound = rb;
    }
    to_py(py, &fl_ao(&k, &l, p, &dist.inner, &cfg).map_err(err)?)
}

/// Names of the bundled reference cases.
#[pyfunction]
fn cases() -> Vec<String> {
    FixtureManifest::bundled().cases.into_iter().map(|c| c.name).collect()
}

/// A bundled case: its parameters and matrices.
#[pyfunction]
fn fixture<'py>(py: Python<'py>, name: &str) -> PyResult<(PyCodeParams, Bound<'py, PyAny>)> {
    let manifest = FixtureManifest::bundled();
    let c = manifest.case(name).map_err(err)?;
    let matrices = serde_json::json!({
        "partitioning": c.partitioning().map_err(err)?.grid().to_rows(),
        "lifting": c.lifting().map_err(err)?.grid().to_rows(),
        "relocation": c.relocation().map_err(err)?.grid().to_rows(),
        "cycle_length": c.cycle_length,
        "expected": c.expected,
    });
    Ok((PyCodeParams { inner: c.params }, to_py(py, &matrices)?))
}

/// Counts the cycles of a bundled case and compares with its known total.
#[pyfunction]
fn verify<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &verify_case(name).map_err(err)?)
}

#[pymodule]
fn mdsc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCodeParams>()?;
    m.add_class::<PyDistMatrix>()?;
    m.add_function(wrap_pyfunction!(count_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(grade, m)?)?;
    m.add_function(wrap_pyfunction!(flao, m)?)?;
    m.add_function(wrap_pyfunction!(cases, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
