//! Python bindings: thin wrappers over the time-varying graph solver, the
//! synthetic data generators, and the evaluation metrics. Vectors cross the
//! boundary as plain lists; weight vectors use the row-major upper-triangle
//! layout of a d-vertex graph (p = d(d-1)/2 entries).

use ndarray::{Array1, Array2};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use tvgl::admm::{solve as admm_solve, AdmmConfig};
use tvgl::graph::{self, DistanceVector, SlotData, WeightVector};
use tvgl::metrics;
use tvgl::objective::ObjectiveParams;
use tvgl::prox::{self, PenaltyKind};
use tvgl::synthetic::{
    evolve_graphs, gen_rbf_graph, gen_smooth_signals, EvolutionConfig, RbfGraphConfig,
    SignalConfig,
};
use tvgl::temporal::TemporalGraph;

fn err(e: tvgl::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn penalty_kind(name: &str) -> PyResult<PenaltyKind> {
    match name {
        "l1" => Ok(PenaltyKind::L1),
        "sql2" => Ok(PenaltyKind::SquaredL2),
        other => Err(PyValueError::new_err(format!(
            "penalty must be \"l1\" or \"sql2\", got {other:?}"
        ))),
    }
}

fn matrix(rows: Vec<Vec<f64>>, what: &str) -> PyResult<Array2<f64>> {
    if rows.is_empty() {
        return Err(PyValueError::new_err(format!("{what} must not be empty")));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(format!("{what} rows have unequal lengths")));
    }
    let nrows = rows.len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((nrows, ncols), flat)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn weight_vector(d: usize, values: Vec<f64>, what: &str) -> PyResult<WeightVector> {
    WeightVector::new(d, Array1::from_vec(values))
        .map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

/// Slot-coupling structure: nodes are time slots, weighted edges tie the
/// graphs of the two slots they join. Slot indices are 0-based.
#[pyclass(frozen)]
struct TemporalStructure {
    inner: TemporalGraph,
}

#[pymethods]
impl TemporalStructure {
    #[new]
    fn new(t_slots: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: TemporalGraph::new(t_slots, &edges).map_err(err)?,
        })
    }

    /// Consecutive slots joined with a shared weight.
    #[staticmethod]
    fn chain(t_slots: usize, gamma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: TemporalGraph::chain(t_slots, gamma).map_err(err)?,
        })
    }

    /// No coupling; each slot stands alone.
    #[staticmethod]
    fn empty(t_slots: usize) -> PyResult<Self> {
        Ok(Self {
            inner: TemporalGraph::empty(t_slots).map_err(err)?,
        })
    }

    #[getter]
    fn t_slots(&self) -> usize {
        self.inner.t_slots()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner
            .edges()
            .iter()
            .map(|e| (e.i, e.j, e.gamma))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "TemporalStructure(t_slots={}, edges={:?})",
            self.inner.t_slots(),
            self.edges()
        )
    }
}

/// What the solver returns: one weight vector per slot plus run diagnostics.
#[pyclass(frozen)]
struct SolveResult {
    #[pyo3(get)]
    graphs: Vec<Vec<f64>>,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    iters: usize,
    #[pyo3(get)]
    primal_residuals: Vec<f64>,
    #[pyo3(get)]
    dual_residuals: Vec<f64>,
    #[pyo3(get)]
    objective: Vec<f64>,
}

#[pymethods]
impl SolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(slots={}, iters={}, converged={})",
            self.graphs.len(),
            self.iters,
            self.converged
        )
    }
}

/// Learn one graph per slot from per-slot pairwise distance vectors.
///
/// `distances` holds one length-p vector per slot, scaled however the caller
/// prefers (the experiment pipeline uses per-sample means). `eta` scales the
/// coupling penalty applied across each structure edge.
#[pyfunction]
#[pyo3(signature = (distances, d, structure, alpha=2.0, beta=0.5, eta=0.0,
    penalty="l1", rho=0.5, tol=1e-3, max_iters=1000, workers=1))]
#[allow(clippy::too_many_arguments)]
fn solve(
    distances: Vec<Vec<f64>>,
    d: usize,
    structure: PyRef<TemporalStructure>,
    alpha: f64,
    beta: f64,
    eta: f64,
    penalty: &str,
    rho: f64,
    tol: f64,
    max_iters: usize,
    workers: usize,
) -> PyResult<SolveResult> {
    let slots: Vec<SlotData> = distances
        .into_iter()
        .map(|r| {
            DistanceVector::new(d, Array1::from_vec(r))
                .map(SlotData::from_distances)
                .map_err(err)
        })
        .collect::<PyResult<_>>()?;
    let params = ObjectiveParams::new(alpha, beta).map_err(err)?;
    let mut cfg = AdmmConfig::new(eta, penalty_kind(penalty)?);
    cfg.rho = rho;
    cfg.abs_tol = tol;
    cfg.rel_tol = tol;
    cfg.max_iters = max_iters;
    cfg.workers = workers;
    let sol = admm_solve(&slots, &structure.inner, &params, &cfg).map_err(err)?;
    Ok(SolveResult {
        graphs: sol.graphs.iter().map(|g| g.values().to_vec()).collect(),
        converged: sol.converged,
        iters: sol.iters,
        primal_residuals: sol.primal_residuals,
        dual_residuals: sol.dual_residuals,
        objective: sol.objective,
    })
}

/// Generate a ground-truth graph sequence and smooth signals for it.
///
/// Returns `(truth, signals)`: `truth[t]` is the slot-t weight vector,
/// `signals[t]` is a d x n_samples matrix as a list of vertex rows. The
/// seed fixes everything.
#[pyfunction]
#[pyo3(signature = (d, t_slots, edges, n_samples, seed, kernel_sigma=0.5,
    threshold=0.75, base_changes=10.0, noise_sigma=0.1))]
#[allow(clippy::too_many_arguments)]
fn generate_dataset(
    d: usize,
    t_slots: usize,
    edges: Vec<(usize, usize, f64)>,
    n_samples: usize,
    seed: u64,
    kernel_sigma: f64,
    threshold: f64,
    base_changes: f64,
    noise_sigma: f64,
) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>)> {
    let structure = TemporalGraph::new(t_slots, &edges).map_err(err)?;
    let mut gcfg = RbfGraphConfig::new(d, seed);
    gcfg.kernel_sigma = kernel_sigma;
    gcfg.threshold = threshold;
    let g0 = gen_rbf_graph(&gcfg).map_err(err)?;
    let mut ecfg = EvolutionConfig::new(seed.wrapping_add(1));
    ecfg.base_changes = base_changes;
    ecfg.kernel_sigma = kernel_sigma;
    ecfg.threshold = threshold;
    let truth = evolve_graphs(&g0, &structure, &ecfg).map_err(err)?;
    let mut signals = Vec::with_capacity(t_slots);
    for (t, w) in truth.iter().enumerate() {
        let mut scfg = SignalConfig::new(n_samples, seed.wrapping_add(2 + t as u64));
        scfg.noise_sigma = noise_sigma;
        let x = gen_smooth_signals(w, &scfg).map_err(err)?;
        signals.push(x.rows().into_iter().map(|r| r.to_vec()).collect());
    }
    Ok((truth.iter().map(|w| w.values().to_vec()).collect(), signals))
}

/// Summed squared distances between vertex rows of a d x N signal matrix,
/// in weight-vector order. Raw sums over samples; divide by the sample
/// count for a size-independent scale.
#[pyfunction]
fn pairwise_distances(signals: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    let x = matrix(signals, "signals")?;
    Ok(graph::pairwise_distances(x.view())
        .map_err(err)?
        .values()
        .to_vec())
}

/// Expand a weight vector into its d x d adjacency matrix.
#[pyfunction]
fn weight_to_adjacency(weights: Vec<f64>, d: usize) -> PyResult<Vec<Vec<f64>>> {
    let w = weight_vector(d, weights, "weights")?;
    let a = graph::weight_to_adjacency(&w);
    Ok(a.rows().into_iter().map(|r| r.to_vec()).collect())
}

/// Matthews correlation coefficient of the thresholded supports.
#[pyfunction]
#[pyo3(signature = (estimate, truth, d, threshold=1e-4))]
fn mcc(estimate: Vec<f64>, truth: Vec<f64>, d: usize, threshold: f64) -> PyResult<f64> {
    let est = weight_vector(d, estimate, "estimate")?;
    let tru = weight_vector(d, truth, "truth")?;
    metrics::mcc(&est, &tru, threshold).map_err(err)
}

/// ||estimate - truth||_F / ||truth||_F on adjacency matrices.
#[pyfunction]
fn relative_error(estimate: Vec<f64>, truth: Vec<f64>, d: usize) -> PyResult<f64> {
    let est = weight_vector(d, estimate, "estimate")?;
    let tru = weight_vector(d, truth, "truth")?;
    metrics::relative_error(&est, &tru).map_err(err)
}

/// Entrywise soft threshold: sign(v) * max(|v| - lam, 0).
#[pyfunction]
fn soft_threshold(values: Vec<f64>, lam: f64) -> Vec<f64> {
    prox::soft_threshold(Array1::from_vec(values).view(), lam).to_vec()
}

/// Joint minimizer of (kappa/2)||z1-z2||_1 + 1/2||z1-a||^2 + 1/2||z2-b||^2.
#[pyfunction]
fn prox_pair_l1(a: Vec<f64>, b: Vec<f64>, kappa: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    if a.len() != b.len() {
        return Err(PyValueError::new_err("a and b must have equal length"));
    }
    let (z1, z2) = prox::prox_pair_l1(
        Array1::from_vec(a).view(),
        Array1::from_vec(b).view(),
        kappa,
    );
    Ok((z1.to_vec(), z2.to_vec()))
}

/// Joint minimizer of kappa||z1-z2||^2 + 1/2||z1-a||^2 + 1/2||z2-b||^2.
#[pyfunction]
fn prox_pair_sql2(a: Vec<f64>, b: Vec<f64>, kappa: f64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    if a.len() != b.len() {
        return Err(PyValueError::new_err("a and b must have equal length"));
    }
    let (z1, z2) = prox::prox_pair_sql2(
        Array1::from_vec(a).view(),
        Array1::from_vec(b).view(),
        kappa,
    );
    Ok((z1.to_vec(), z2.to_vec()))
}

#[pymodule]
fn tvgl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TemporalStructure>()?;
    m.add_class::<SolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_distances, m)?)?;
    m.add_function(wrap_pyfunction!(weight_to_adjacency, m)?)?;
    m.add_function(wrap_pyfunction!(mcc, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(prox_pair_l1, m)?)?;
    m.add_function(wrap_pyfunction!(prox_pair_sql2, m)?)?;
    Ok(())
}
