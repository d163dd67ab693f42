//! Python bindings for the ckgraph classification library.
//!
//! Build the extension with `cargo build -p ckgraph-py`; the resulting
//! `libckgraph_py.so` imports as the module `ckgraph_py` (see
//! `python/smoke_test.py` for a loader). Inputs accept built-in names
//! (`loop_plus_edge`, `thesis:2times`, `omega:2:3,2`, `robertson`), file
//! paths, or raw JSON documents.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use ckgraph::classify::{
    classify_digraph, classify_kgraph, classify_staged_digraph, classify_staged_kgraph,
    frequently_divertable_staged, FdOutcome,
};
use ckgraph::desourcify::{materialize_truncation, BoundaryCtx};
use ckgraph::doc::{parse_input, parse_path_literal, InputKind, ParsedPath};
use ckgraph::families::{
    builtin_digraph, builtin_kgraph, builtin_staged, builtin_staged_kgraph, SequenceFamily,
};
use ckgraph::groupoid::{
    default_escape_cover, k_times_witness_check, multiplicity_profile, WitnessChoice,
};
use ckgraph::kgraph::Degree;
use ckgraph::paths::shift_equivalent;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, to_py(py, val)?)?;
            }
            dict.into_any()
        }
    })
}

enum Resolved {
    Digraph(ckgraph::graph::DirectedGraph),
    Staged(ckgraph::staged::StagedDigraph),
    KGraph(ckgraph::kgraph::KGraph),
    StagedK(ckgraph::kstaged::StagedKGraph),
}

fn resolve(input: &str) -> PyResult<Resolved> {
    if let Some(f) = builtin_staged(input) {
        return Ok(Resolved::Staged(f));
    }
    if let Some(g) = builtin_digraph(input) {
        return Ok(Resolved::Digraph(g));
    }
    if let Some(kg) = builtin_kgraph(input) {
        return Ok(Resolved::KGraph(kg));
    }
    if let Some(f) = builtin_staged_kgraph(input) {
        return Ok(Resolved::StagedK(f));
    }
    let body = if input.trim_start().starts_with('{') {
        input.to_string()
    } else {
        std::fs::read_to_string(input).map_err(|e| {
            PyValueError::new_err(format!("`{input}` is not a built-in name or readable file: {e}"))
        })?
    };
    match parse_input("input", &body).map_err(err)? {
        InputKind::Digraph(g) => Ok(Resolved::Digraph(g)),
        InputKind::Staged(f) => Ok(Resolved::Staged(f)),
        InputKind::KGraph(kg) => Ok(Resolved::KGraph(kg)),
    }
}

/// Classify a graph, staged family or k-graph; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (input, budget = 8))]
fn classify<'py>(py: Python<'py>, input: &str, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    let report = match resolve(input)? {
        Resolved::Digraph(g) => classify_digraph(&g),
        Resolved::Staged(f) => classify_staged_digraph(&f, budget),
        Resolved::KGraph(kg) => classify_kgraph(&kg, budget as u32),
        Resolved::StagedK(f) => classify_staged_kgraph(&f, budget as u32),
    };
    to_py(py, &serde_json::to_value(&report).map_err(err)?)
}

/// Validate the factorization squares of a k-graph.
#[pyfunction]
fn validate_kgraph<'py>(py: Python<'py>, input: &str) -> PyResult<Bound<'py, PyAny>> {
    let kg = match resolve(input)? {
        Resolved::KGraph(kg) => kg,
        _ => return Err(PyValueError::new_err("expected a k-graph")),
    };
    let report = kg.validate();
    let doc = serde_json::json!({
        "valid": report.is_valid(),
        "findings": report.findings,
        "locally_convex": if report.is_valid() { Some(kg.locally_convex()) } else { None },
    });
    to_py(py, &doc)
}

/// Cylinder-count table and relative multiplicities of a built-in family.
#[pyfunction]
#[pyo3(signature = (family, cylinders = 6, window = 16, target = 0, budget = 8))]
fn profile<'py>(
    py: Python<'py>,
    family: &str,
    cylinders: usize,
    window: usize,
    target: usize,
    budget: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let fam = SequenceFamily::new(family)
        .ok_or_else(|| PyValueError::new_err(format!("unknown family `{family}`")))?;
    let p = multiplicity_profile(&fam, target, cylinders, window, budget);
    to_py(py, &serde_json::to_value(&p).map_err(err)?)
}

/// k-times witness verification for a built-in family.
#[pyfunction]
#[pyo3(signature = (family, k = None, witnesses = "canonical", target = 0, window = 16, cylinders = 6, budget = 8))]
#[allow(clippy::too_many_arguments)]
fn witness_check<'py>(
    py: Python<'py>,
    family: &str,
    k: Option<usize>,
    witnesses: &str,
    target: usize,
    window: usize,
    cylinders: usize,
    budget: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let fam = SequenceFamily::new(family)
        .ok_or_else(|| PyValueError::new_err(format!("unknown family `{family}`")))?;
    let choice = match witnesses {
        "canonical" => WitnessChoice::Canonical,
        "duplicated" => WitnessChoice::Duplicated,
        other => return Err(PyValueError::new_err(format!("unknown witness set `{other}`"))),
    };
    let k = k.unwrap_or_else(|| fam.min_parallel());
    let cover = default_escape_cover(&fam, cylinders, budget);
    let report = k_times_witness_check(&fam, target, k, choice, window, cylinders, &cover, budget);
    to_py(py, &serde_json::to_value(&report).map_err(err)?)
}

/// Lag set of two path literals over a directed graph or staged family.
#[pyfunction]
#[pyo3(signature = (input, x, y, budget = 8))]
fn lag_set<'py>(
    py: Python<'py>,
    input: &str,
    x: &str,
    y: &str,
    budget: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let resolved = resolve(input)?;
    let (graph, staged) = match &resolved {
        Resolved::Digraph(g) => (g.clone(), None),
        Resolved::Staged(f) => (f.stage(budget.max(8)), Some(f)),
        _ => return Err(PyValueError::new_err("expected a directed graph")),
    };
    let px = parse_path_literal(&graph, staged, x).map_err(err)?;
    let py_ = parse_path_literal(&graph, staged, y).map_err(err)?;
    let value = match (px, py_) {
        (ParsedPath::Infinite(a), ParsedPath::Infinite(b)) => {
            serde_json::to_value(shift_equivalent(&a, &b)).map_err(err)?
        }
        _ => Value::String("Empty".into()),
    };
    to_py(py, &value)
}

/// Frequently-divertable check between two infinite-path literals of a
/// staged family.
#[pyfunction]
#[pyo3(signature = (input, x, y, budget = 8))]
fn frequently_divertable<'py>(
    py: Python<'py>,
    input: &str,
    x: &str,
    y: &str,
    budget: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let f = match resolve(input)? {
        Resolved::Staged(f) => f,
        _ => return Err(PyValueError::new_err("expected a staged family")),
    };
    let graph = f.stage(budget.max(8));
    let px = parse_path_literal(&graph, Some(&f), x).map_err(err)?;
    let py_path = parse_path_literal(&graph, Some(&f), y).map_err(err)?;
    let (a, b) = match (px, py_path) {
        (ParsedPath::Infinite(a), ParsedPath::Infinite(b)) => (a, b),
        _ => return Err(PyValueError::new_err("both literals must be infinite paths")),
    };
    let doc = match frequently_divertable_staged(&f, &a, &b, budget) {
        FdOutcome::Yes => serde_json::json!({"verdict": "yes"}),
        FdOutcome::No { stuck_vertex } => {
            serde_json::json!({"verdict": "no", "stuck_vertex": stuck_vertex})
        }
        FdOutcome::Unknown { reason } => {
            serde_json::json!({"verdict": "unknown", "reason": reason})
        }
    };
    to_py(py, &doc)
}

/// Materialize a truncation of the desourcification of a k-graph.
#[pyfunction]
#[pyo3(signature = (input, truncate, columns = 4, budget = 8))]
fn desourcify<'py>(
    py: Python<'py>,
    input: &str,
    truncate: Vec<u32>,
    columns: u32,
    budget: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let frag = match resolve(input)? {
        Resolved::KGraph(kg) => {
            let ctx = BoundaryCtx::finite(&kg, budget as u32);
            let roots: Vec<String> =
                kg.skeleton().vertices().map(|v| kg.vertex_name(v).to_string()).collect();
            materialize_truncation(&ctx, &roots, &Degree(truncate)).map_err(err)?
        }
        Resolved::StagedK(f) => {
            let ctx = BoundaryCtx::staged(&f, columns + 4);
            let stage = f.stage(columns);
            let roots: Vec<String> = stage
                .skeleton()
                .vertices()
                .map(|v| stage.vertex_name(v).to_string())
                .collect();
            materialize_truncation(&ctx, &roots, &Degree(truncate)).map_err(err)?
        }
        _ => return Err(PyValueError::new_err("expected a k-graph")),
    };
    to_py(py, &serde_json::to_value(&frag).map_err(err)?)
}

/// A directed graph handle exposing the basic structural queries.
#[pyclass]
struct Digraph {
    inner: ckgraph::graph::DirectedGraph,
}

#[pymethods]
impl Digraph {
    #[new]
    fn new(input: &str) -> PyResult<Self> {
        match resolve(input)? {
            Resolved::Digraph(g) => Ok(Digraph { inner: g }),
            Resolved::Staged(f) => Ok(Digraph { inner: f.stage(8) }),
            _ => Err(PyValueError::new_err("expected a directed graph")),
        }
    }

    fn sources(&self) -> Vec<String> {
        self.inner
            .sources()
            .into_iter()
            .map(|v| self.inner.vertex_name(v).to_string())
            .collect()
    }

    fn cycles(&self) -> Vec<Vec<String>> {
        self.inner.find_cycles().iter().map(|c| c.names(&self.inner)).collect()
    }

    fn cycle_entries(&self, cycle: Vec<String>) -> PyResult<Vec<String>> {
        let edges = cycle
            .iter()
            .map(|name| self.inner.edge(name).ok_or_else(|| PyValueError::new_err(name.clone())))
            .collect::<PyResult<Vec<_>>>()?;
        let c = ckgraph::graph::Cycle::canonical(&self.inner, edges);
        Ok(self
            .inner
            .cycle_entries(&c)
            .into_iter()
            .map(|e| self.inner.edge_name(e).to_string())
            .collect())
    }

    fn splitting_pairs(&self) -> Vec<(String, String)> {
        let all = self.inner.all_edges_set();
        self.inner
            .splitting_pairs_in(&all)
            .into_iter()
            .map(|(a, b)| {
                (self.inner.edge_name(a).to_string(), self.inner.edge_name(b).to_string())
            })
            .collect()
    }

    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }
}

#[pymodule]
fn ckgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Digraph>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(validate_kgraph, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(witness_check, m)?)?;
    m.add_function(wrap_pyfunction!(lag_set, m)?)?;
    m.add_function(wrap_pyfunction!(frequently_divertable, m)?)?;
    m.add_function(wrap_pyfunction!(desourcify, m)?)?;
    Ok(())
}
