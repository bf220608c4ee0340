//! Python bindings: graphs, affinities, the two clustering engines,
//! partition quality metrics, and the bundled benchmark datasets.
//!
//! Build with `cargo build -p borgia-py`, rename the produced
//! `libborgia_py.so` to `borgia_py.so` somewhere on `sys.path`, and
//! `import borgia_py`.

use borgia::affinity::AffinitySpec;
use borgia::classic::{self, ClassicConfig};
use borgia::dendrogram::{Dendrogram, SelectionMode};
use borgia::engine::{self, DeltaMode, EngineConfig, Policy};
use borgia::graph::{Graph as CoreGraph, GraphFormat};
use borgia::metrics::{self, Partition};
use borgia::tnorm::TNorm;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::HashMap;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A weighted sociogram with stable string labels.
#[pyclass(frozen)]
struct Graph {
    inner: CoreGraph,
}

#[pymethods]
impl Graph {
    /// Builds a graph from `(source, target, weight)` triples.
    #[staticmethod]
    #[pyo3(signature = (edges, directed=false))]
    fn from_edges(edges: Vec<(String, String, f64)>, directed: bool) -> PyResult<Self> {
        Ok(Graph {
            inner: CoreGraph::from_edges(directed, &edges).map_err(value_error)?,
        })
    }

    /// Parses a graph from text; `fmt` is "edge-list", "matrix-csv", or "gml".
    #[staticmethod]
    #[pyo3(signature = (text, fmt="edge-list", directed=false))]
    fn load(text: &str, fmt: &str, directed: bool) -> PyResult<Self> {
        let format = match fmt {
            "edge-list" => GraphFormat::EdgeList,
            "matrix-csv" => GraphFormat::MatrixCsv,
            "gml" => GraphFormat::GmlSubset,
            other => {
                return Err(value_error(format!(
                    "unknown format `{other}`; expected edge-list, matrix-csv, or gml"
                )))
            }
        };
        Ok(Graph {
            inner: CoreGraph::load(text, format, directed).map_err(value_error)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.directed()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// Edge weight between two actors, addressed by label.
    fn weight(&self, source: &str, target: &str) -> PyResult<f64> {
        let x = self
            .inner
            .index_of(source)
            .ok_or_else(|| value_error(format!("actor `{source}` is not in the graph")))?;
        let y = self
            .inner
            .index_of(target)
            .ok_or_else(|| value_error(format!("actor `{target}` is not in the graph")))?;
        Ok(self.inner.weight(x, y))
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, directed={})",
            self.inner.n(),
            self.inner.directed()
        )
    }
}

fn partition_from_dict(graph: &CoreGraph, communities: &HashMap<String, i64>) -> PyResult<Partition> {
    let mut ids = Vec::with_capacity(graph.n());
    for label in graph.labels() {
        match communities.get(label) {
            Some(id) => ids.push(*id),
            None => {
                return Err(value_error(format!(
                    "partition does not cover actor `{label}`"
                )))
            }
        }
    }
    Partition::from_labels(&ids).map_err(value_error)
}

/// A finished clustering run: the fusion history plus enough context to
/// read partitions back out of it.
#[pyclass(frozen)]
struct Run {
    dendrogram: Dendrogram,
    labels: Vec<String>,
    iterations: Option<u64>,
}

#[pymethods]
impl Run {
    #[getter]
    fn total_time(&self) -> f64 {
        self.dendrogram.total_time()
    }

    #[getter]
    fn fusion_count(&self) -> usize {
        self.dendrogram.fusions().len()
    }

    /// Simulation iterations, or None for the classic baseline.
    #[getter]
    fn iterations(&self) -> Option<u64> {
        self.iterations
    }

    /// Reads a partition out of the fusion history as `{label: community}`.
    ///
    /// `mode` is "score" or "lifespan"; passing `k` overrides it with an
    /// exact community count.
    #[pyo3(signature = (mode="score", k=None))]
    fn select(&self, mode: &str, k: Option<usize>) -> PyResult<HashMap<String, usize>> {
        let selection = match (k, mode) {
            (Some(k), _) => SelectionMode::FixedK(k),
            (None, "score") => SelectionMode::Score,
            (None, "lifespan") => SelectionMode::Lifespan,
            (None, other) => {
                return Err(value_error(format!(
                    "unknown selection mode `{other}`; expected score or lifespan"
                )))
            }
        };
        let partition = self.dendrogram.select(selection).map_err(value_error)?;
        Ok(self
            .labels
            .iter()
            .cloned()
            .zip(partition.assignment().iter().copied())
            .collect())
    }

    /// The full fusion history serialized as JSON.
    fn dendrogram_json(&self) -> String {
        self.dendrogram.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Run(actors={}, fusions={}, total_time={})",
            self.labels.len(),
            self.fusion_count(),
            self.dendrogram.total_time()
        )
    }
}

/// Computes an affinity matrix as a nested list, row actor first.
///
/// `kind` is one of "bf", "bcf", "sn", "ma", "combine".
#[pyfunction]
#[pyo3(signature = (graph, kind="combine", alpha=0.7))]
fn affinity(graph: &Graph, kind: &str, alpha: f64) -> PyResult<Vec<Vec<f64>>> {
    let spec = match kind {
        "bf" => AffinitySpec::BestFriend,
        "bcf" => AffinitySpec::BestCommonFriend { base: None },
        "sn" => AffinitySpec::SocialNetworking {
            base: Box::new(AffinitySpec::BestFriend),
        },
        "ma" => AffinitySpec::Machiavelli,
        "combine" => AffinitySpec::Combined { alpha },
        other => {
            return Err(value_error(format!(
                "unknown affinity `{other}`; expected bf, bcf, sn, ma, or combine"
            )))
        }
    };
    let matrix = spec.resolve(&graph.inner).map_err(value_error)?;
    let n = matrix.n();
    Ok((0..n).map(|x| matrix.row(x).to_vec()).collect())
}

/// Runs the affinity-space gravitational simulation to a full fusion
/// history.
#[pyfunction]
#[pyo3(signature = (graph, alpha=0.7, p=3.0, c=0.0, delta=0.1, tnorm="product",
                    delta_mode="dynamic-first", policy="early-roman"))]
#[allow(clippy::too_many_arguments)]
fn cluster(
    graph: &Graph,
    alpha: f64,
    p: f64,
    c: f64,
    delta: f64,
    tnorm: &str,
    delta_mode: &str,
    policy: &str,
) -> PyResult<Run> {
    let cfg = EngineConfig {
        alpha,
        p,
        c,
        delta,
        tnorm: match tnorm {
            "product" => TNorm::Product,
            "minimum" => TNorm::Minimum,
            other => {
                return Err(value_error(format!(
                    "unknown t-norm `{other}`; expected product or minimum"
                )))
            }
        },
        delta_mode: match delta_mode {
            "static" => DeltaMode::Static,
            "dynamic-first" => DeltaMode::DynamicFirst,
            other => {
                return Err(value_error(format!(
                    "unknown delta mode `{other}`; expected static or dynamic-first"
                )))
            }
        },
        policy: match policy {
            "naive" => Policy::Naive,
            "early-roman" => Policy::EarlyRoman,
            other => {
                return Err(value_error(format!(
                    "unknown policy `{other}`; expected naive or early-roman"
                )))
            }
        },
        ..EngineConfig::default()
    };
    let report = engine::run(&graph.inner, &cfg).map_err(value_error)?;
    Ok(Run {
        dendrogram: report.dendrogram,
        labels: graph.inner.labels().to_vec(),
        iterations: Some(report.iterations),
    })
}

/// Runs the classical point-cloud gravity baseline.
#[pyfunction]
#[pyo3(signature = (graph, g=1.0, delta=0.1, epsilon=None))]
fn classic_cluster(graph: &Graph, g: f64, delta: f64, epsilon: Option<f64>) -> PyResult<Run> {
    let cfg = ClassicConfig {
        g,
        delta,
        epsilon,
        ..ClassicConfig::default()
    };
    let dendrogram = classic::classic_run(&graph.inner, &cfg).map_err(value_error)?;
    Ok(Run {
        dendrogram,
        labels: graph.inner.labels().to_vec(),
        iterations: None,
    })
}

#[pyfunction]
fn modularity(graph: &Graph, communities: HashMap<String, i64>) -> PyResult<f64> {
    let partition = partition_from_dict(&graph.inner, &communities)?;
    metrics::modularity(&graph.inner, &partition).map_err(value_error)
}

#[pyfunction]
fn modularity_density(graph: &Graph, communities: HashMap<String, i64>) -> PyResult<f64> {
    let partition = partition_from_dict(&graph.inner, &communities)?;
    metrics::modularity_density(&graph.inner, &partition).map_err(value_error)
}

fn paired_partitions(
    a: &HashMap<String, i64>,
    b: &HashMap<String, i64>,
) -> PyResult<(Partition, Partition)> {
    if a.len() != b.len() || !a.keys().all(|k| b.contains_key(k)) {
        return Err(value_error(
            "the two partitions must cover exactly the same actors",
        ));
    }
    let mut keys: Vec<&String> = a.keys().collect();
    keys.sort();
    let left: Vec<i64> = keys.iter().map(|k| a[*k]).collect();
    let right: Vec<i64> = keys.iter().map(|k| b[*k]).collect();
    Ok((
        Partition::from_labels(&left).map_err(value_error)?,
        Partition::from_labels(&right).map_err(value_error)?,
    ))
}

/// Normalized mutual information between two labelings of the same actors.
#[pyfunction]
fn nmi(a: HashMap<String, i64>, b: HashMap<String, i64>) -> PyResult<f64> {
    let (pa, pb) = paired_partitions(&a, &b)?;
    metrics::nmi(&pa, &pb).map_err(value_error)
}

/// Adjusted Rand index between two labelings of the same actors.
#[pyfunction]
fn ari(a: HashMap<String, i64>, b: HashMap<String, i64>) -> PyResult<f64> {
    let (pa, pb) = paired_partitions(&a, &b)?;
    metrics::ari(&pa, &pb).map_err(value_error)
}

/// Loads a bundled benchmark by name ("karate", "dolphins", "football",
/// "polbooks") as `(graph, ground_truth | None)`.
#[pyfunction]
fn load_benchmark(name: &str) -> PyResult<(Graph, Option<HashMap<String, usize>>)> {
    let ds = borgia::datasets::load_benchmark(name).map_err(value_error)?;
    let truth = ds.ground_truth.map(|t| {
        ds.graph
            .labels()
            .iter()
            .cloned()
            .zip(t.assignment().iter().copied())
            .collect()
    });
    Ok((Graph { inner: ds.graph }, truth))
}

#[pymodule]
fn borgia_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(affinity, m)?)?;
    m.add_function(wrap_pyfunction!(cluster, m)?)?;
    m.add_function(wrap_pyfunction!(classic_cluster, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(modularity_density, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(ari, m)?)?;
    m.add_function(wrap_pyfunction!(load_benchmark, m)?)?;
    Ok(())
}
