//! Python bindings. Labels cross the boundary 1-based; matrices are lists of rows.

use std::collections::BTreeMap;

use dcdfm_core as core;
use dcdfm_core::{DomainPolicy, EdgeDistribution, Error, KMeansConfig, Labeling, Method, WeightedAdjacency};
use nalgebra::DMatrix;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn labeling(labels: &[usize]) -> PyResult<Labeling> {
    Labeling::from_one_based(labels).map_err(to_py)
}

fn distribution(name: &str, variance: Option<f64>, trials: Option<u64>) -> PyResult<EdgeDistribution> {
    let d = match name.to_ascii_lowercase().as_str() {
        "normal" => EdgeDistribution::Normal {
            variance: variance.ok_or_else(|| PyValueError::new_err("normal needs variance"))?,
        },
        "binomial" => EdgeDistribution::Binomial {
            trials: trials.ok_or_else(|| PyValueError::new_err("binomial needs trials"))?,
        },
        "bernoulli" => EdgeDistribution::Bernoulli,
        "poisson" => EdgeDistribution::Poisson,
        other => return Err(PyValueError::new_err(format!("unknown distribution `{other}`"))),
    };
    d.validate().map_err(to_py)?;
    Ok(d)
}

/// Validated model parameters: labels, connectivity matrix and node weights.
#[pyclass(name = "Model", frozen)]
struct PyModel(core::ModelParams);

#[pymethods]
impl PyModel {
    #[new]
    fn new(labels: Vec<usize>, p: Vec<Vec<f64>>, theta: Vec<f64>) -> PyResult<Self> {
        let k = p.len();
        if labels.contains(&0) {
            return Err(PyValueError::new_err("labels are 1-based"));
        }
        let zero_based = labels.iter().map(|l| l - 1).collect();
        let params = core::validate_params(k, zero_based, matrix(p)?, theta).map_err(to_py)?;
        Ok(Self(params))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.0.labeling().to_one_based()
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.0.theta().values().to_vec()
    }

    /// Expectation matrix `Theta Z P Z' Theta`.
    fn omega(&self) -> Vec<Vec<f64>> {
        rows(&core::build_omega(&self.0))
    }

    /// Draws a symmetric adjacency matrix with mean `omega()`.
    #[pyo3(signature = (distribution, seed, variance=None, trials=None, clip=false))]
    fn sample(
        &self,
        distribution: &str,
        seed: u64,
        variance: Option<f64>,
        trials: Option<u64>,
        clip: bool,
    ) -> PyResult<Vec<Vec<f64>>> {
        let dist = self::distribution(distribution, variance, trials)?;
        let policy = if clip { DomainPolicy::Clip } else { DomainPolicy::Strict };
        let a = core::sample_adjacency_with(&core::build_omega(&self.0), &dist, seed, policy).map_err(to_py)?;
        Ok(rows(a.matrix()))
    }

    /// Variance scale of `distribution` under this model.
    #[pyo3(signature = (distribution, variance=None, trials=None))]
    fn gamma(&self, distribution: &str, variance: Option<f64>, trials: Option<u64>) -> PyResult<f64> {
        Ok(core::gamma_bound(&self::distribution(distribution, variance, trials)?, &self.0))
    }

    /// Consistency-bound quantities for an observed matrix, as a dict.
    fn bound_report(&self, a: Vec<Vec<f64>>, gamma: f64) -> PyResult<BTreeMap<&'static str, f64>> {
        let a = WeightedAdjacency::new(matrix(a)?).map_err(to_py)?;
        let report = core::bound_report(&a, &self.0, gamma).map_err(to_py)?;
        Ok(report.fields().into_iter().collect())
    }

    fn __repr__(&self) -> String {
        format!("Model(n={}, k={})", self.0.n(), self.0.k())
    }
}

#[pyclass(name = "Detection", frozen, get_all)]
struct PyDetection {
    method: String,
    labels: Vec<usize>,
    eigenvalues: Vec<f64>,
    objective: f64,
    degenerate_rows: Vec<usize>,
}

#[pymethods]
impl PyDetection {
    fn __repr__(&self) -> String {
        format!("Detection(method={}, n={})", self.method, self.labels.len())
    }
}

fn run(a: Vec<Vec<f64>>, k: usize, seed: u64, restarts: usize, method: Method) -> PyResult<PyDetection> {
    let a = WeightedAdjacency::new(matrix(a)?).map_err(to_py)?;
    let config = KMeansConfig::new(k, seed).with_restarts(restarts);
    let out = core::detect(&a, method, &config).map_err(to_py)?;
    Ok(PyDetection {
        method: method.to_string(),
        labels: out.labeling.to_one_based(),
        eigenvalues: out.embedding.eigenvalues,
        objective: out.kmeans.objective,
        degenerate_rows: out.degenerate_rows,
    })
}

/// Normalized spectral clustering of a symmetric matrix into `k` communities.
#[pyfunction]
#[pyo3(signature = (a, k, seed=0, restarts=20))]
fn ndfa(a: Vec<Vec<f64>>, k: usize, seed: u64, restarts: usize) -> PyResult<PyDetection> {
    run(a, k, seed, restarts, Method::Normalized)
}

/// Same as `ndfa` without row normalization.
#[pyfunction]
#[pyo3(signature = (a, k, seed=0, restarts=20))]
fn dfa(a: Vec<Vec<f64>>, k: usize, seed: u64, restarts: usize) -> PyResult<PyDetection> {
    run(a, k, seed, restarts, Method::Unnormalized)
}

#[pyfunction]
fn error_rate(est: Vec<usize>, truth: Vec<usize>) -> PyResult<f64> {
    core::error_rate(&labeling(&est)?, &labeling(&truth)?).map_err(to_py)
}

#[pyfunction]
fn f_hat(est: Vec<usize>, truth: Vec<usize>) -> PyResult<f64> {
    core::f_hat(&labeling(&est)?, &labeling(&truth)?).map_err(to_py)
}

type GmlTuple = (Vec<Vec<f64>>, Option<Vec<usize>>, Vec<i64>);

/// Reads a GML file; returns `(adjacency, labels or None, node_ids)`.
#[pyfunction]
fn read_gml(path: &str) -> PyResult<GmlTuple> {
    let bytes = std::fs::read(path).map_err(|e| to_py(e.into()))?;
    let ds = core::parse_gml(path, &bytes).map_err(to_py)?;
    Ok((
        rows(ds.adjacency.matrix()),
        ds.truth.map(|t| t.to_one_based()),
        ds.node_ids,
    ))
}

/// Runs a built-in experiment; returns `(param_value, replicate, method, error)` rows.
#[pyfunction]
#[pyo3(signature = (experiment, replicates=None, seed=0))]
fn simulate(experiment: &str, replicates: Option<usize>, seed: u64) -> PyResult<Vec<(f64, usize, String, f64)>> {
    let id: core::ExperimentId = experiment.parse().map_err(PyValueError::new_err)?;
    let mut spec = core::ExperimentSpec::preset(id)
        .ok_or_else(|| PyValueError::new_err(format!("{id} is not a simulation preset")))?;
    if let Some(r) = replicates {
        spec.replicates = r;
    }
    spec.base_seed = seed;
    let records = core::run_simulation(&spec, true).map_err(to_py)?;
    Ok(records
        .into_iter()
        .map(|r| (r.param_value, r.replicate, r.method.to_string(), r.error))
        .collect())
}

#[pymodule]
fn dcdfm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyDetection>()?;
    m.add_function(wrap_pyfunction!(ndfa, m)?)?;
    m.add_function(wrap_pyfunction!(dfa, m)?)?;
    m.add_function(wrap_pyfunction!(error_rate, m)?)?;
    m.add_function(wrap_pyfunction!(f_hat, m)?)?;
    m.add_function(wrap_pyfunction!(read_gml, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
