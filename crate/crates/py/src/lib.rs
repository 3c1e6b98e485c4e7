//! Python module `gsos`: specifications, transition systems, bisimilarity,
//! decompositions and cell certificates.

use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gsos_core::bisim::{
    congruence_test, contexts_up_to, parse_closed, parse_context, reachable_fragment_with, refine, Mutation,
};
use gsos_core::cellularity::{cell_certificate, certificate_report, preserve_bisim_lift};
use gsos_core::familial::{decompose as decompose_element, decomposition_report, unit};
use gsos_core::lts::{from_json_with_labels, to_dot, to_json, Morphism, Presheaf};
use gsos_core::spec::{ccs, parse_spec, pretty_print, toy, GsosSpec};
use gsos_core::term::{
    check_monad_laws, label, one_step, parse_element, parse_proof, parse_term, show_proof, show_term, tgt,
};

fn err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A parsed and validated specification.
#[pyclass(name = "Spec", frozen)]
struct PySpec {
    inner: Arc<GsosSpec>,
}

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySpec { inner: Arc::new(parse_spec(text).map_err(err)?) })
    }

    #[staticmethod]
    fn ccs() -> Self {
        PySpec { inner: Arc::new(ccs()) }
    }

    #[staticmethod]
    fn toy() -> Self {
        PySpec { inner: Arc::new(toy()) }
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels.names().to_vec()
    }

    #[getter]
    fn ops(&self) -> Vec<(String, usize)> {
        self.inner.signature.decls().iter().map(|d| (d.name.clone(), d.arity)).collect()
    }

    #[getter]
    fn rules(&self) -> Vec<String> {
        self.inner.rule_ids().map(|r| self.inner.display_name(r).to_string()).collect()
    }

    fn pretty(&self) -> String {
        pretty_print(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Spec(labels={:?}, ops={}, rules={})", self.labels(), self.inner.signature.len(), self.inner.rules.len())
    }
}

/// A finite transition system over a specification's labels.
#[pyclass(name = "Lts", frozen)]
struct PyLts {
    inner: Arc<Presheaf>,
}

#[pymethods]
impl PyLts {
    #[staticmethod]
    fn from_json(spec: &PySpec, text: &str) -> PyResult<Self> {
        Ok(PyLts { inner: Arc::new(from_json_with_labels(spec.inner.labels.clone(), text).map_err(err)?) })
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    fn to_dot(&self) -> String {
        to_dot(&self.inner)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.state_names().to_vec()
    }

    /// `(id, label, source, target)` for every edge.
    #[getter]
    fn edges(&self) -> Vec<(String, String, String, String)> {
        let x = &self.inner;
        x.edges()
            .iter()
            .map(|e| {
                let l = x.labels().name(e.label).to_string();
                (e.id.clone(), l, x.state_name(e.src).to_string(), x.state_name(e.tgt).to_string())
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Lts(states={}, edges={})", self.inner.num_states(), self.inner.num_edges())
    }
}

/// Parse errors of a specification text as `(kind, line, col, rule, message)`;
/// empty when the text is valid.
#[pyfunction]
fn check(text: &str) -> Vec<(String, usize, usize, Option<String>, String)> {
    match parse_spec(text) {
        Ok(_) => Vec::new(),
        Err(errs) => {
            errs.0.into_iter().map(|e| (e.kind.as_str().to_string(), e.line, e.col, e.rule, e.message)).collect()
        }
    }
}

/// One-step transitions of a closed term as `(label, proof, target)`.
#[pyfunction]
fn transitions(spec: &PySpec, term: &str) -> PyResult<Vec<(String, String, String)>> {
    let s = &spec.inner;
    let m = parse_closed(s, term).map_err(err)?;
    let empty = Presheaf::empty(s.labels.clone());
    Ok(one_step(s, &m)
        .map_err(err)?
        .iter()
        .map(|p| {
            let l = s.labels.name(label(s, &empty, p)).to_string();
            (l, show_proof(s, &empty, p), show_term(s, &empty, &tgt(s, &empty, p)))
        })
        .collect())
}

/// Transition system reachable from closed terms within `fuel` steps, with
/// the states whose transitions were not explored.
#[pyfunction]
#[pyo3(signature = (spec, terms, fuel, mutate = false))]
fn reachable(spec: &PySpec, terms: Vec<String>, fuel: usize, mutate: bool) -> PyResult<(PyLts, Vec<String>)> {
    let s = &spec.inner;
    let seeds = terms.iter().map(|t| parse_closed(s, t)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let frag = reachable_fragment_with(s, &seeds, fuel, mutate.then_some(Mutation::SyncDepthCut)).map_err(err)?;
    let frontier = frag.frontier.iter().map(|st| frag.carrier.state_name(*st).to_string()).collect();
    Ok((PyLts { inner: frag.carrier }, frontier))
}

/// Whether two closed terms agree up to `k` steps; `fuel` defaults to `k`.
#[pyfunction]
#[pyo3(signature = (spec, t1, t2, k, fuel = None))]
fn bisimilar(spec: &PySpec, t1: &str, t2: &str, k: usize, fuel: Option<usize>) -> PyResult<bool> {
    let s = &spec.inner;
    let fuel = fuel.unwrap_or(k);
    if fuel < k {
        return Err(err(format!("fuel {fuel} cannot decide stratum {k}")));
    }
    let (u, v) = (parse_closed(s, t1).map_err(err)?, parse_closed(s, t2).map_err(err)?);
    let frag = reachable_fragment_with(s, &[u.clone(), v.clone()], fuel, None).map_err(err)?;
    let block = refine(&frag.carrier, k);
    let (su, sv) = (frag.state_of(&u).expect("seed present"), frag.state_of(&v).expect("seed present"));
    Ok(block[su.0] == block[sv.0])
}

/// Shape, arity and filler of a term or transition, over `lts` or over the
/// empty system for closed elements.
#[pyfunction]
#[pyo3(signature = (spec, element, lts = None))]
fn decompose<'py>(py: Python<'py>, spec: &PySpec, element: &str, lts: Option<&PyLts>) -> PyResult<Bound<'py, PyAny>> {
    let s = &spec.inner;
    let x = match lts {
        Some(l) => l.inner.clone(),
        None => Arc::new(Presheaf::empty(s.labels.clone())),
    };
    let z = parse_element(s, x.as_ref(), element).map_err(err)?;
    let d = decompose_element(s, &x, &z).map_err(err)?;
    to_py(py, &decomposition_report(s, &d))
}

/// Cell certificate of a transition shape such as `rsync(ax(a_bar), ax(a))`.
#[pyfunction]
fn certify<'py>(py: Python<'py>, spec: &PySpec, shape: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = &spec.inner;
    let one = unit(s);
    let r = parse_proof(s, &one, shape).map_err(err)?;
    let cert = cell_certificate(s, &r).map_err(err)?;
    to_py(py, &certificate_report(&cert))
}

/// Lifts `proof` (over the codomain) along the functional bisimulation given
/// by the name maps, starting from `term` over the domain.
#[pyfunction]
#[pyo3(signature = (spec, domain, codomain, states, edges, term, proof, d = 2))]
#[allow(clippy::too_many_arguments)]
fn lift(
    spec: &PySpec,
    domain: &PyLts,
    codomain: &PyLts,
    states: HashMap<String, String>,
    edges: HashMap<String, String>,
    term: &str,
    proof: &str,
    d: usize,
) -> PyResult<String> {
    let s = &spec.inner;
    let (x, y) = (domain.inner.clone(), codomain.inner.clone());
    let f = Morphism::from_names(
        x.clone(),
        y.clone(),
        states.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        edges.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
    .map_err(err)?;
    let m = parse_term(s, x.as_ref(), term).map_err(err)?;
    let r = parse_proof(s, y.as_ref(), proof).map_err(err)?;
    let r0 = preserve_bisim_lift(s, &f, &m, &r, d).map_err(err)?;
    Ok(show_proof(s, x.as_ref(), &r0))
}

/// Seeded check of the unit and associativity laws on random elements.
#[pyfunction]
#[pyo3(signature = (spec, seed = 0, cases = 100, d = 3))]
fn monad_laws<'py>(py: Python<'py>, spec: &PySpec, seed: u64, cases: u64, d: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &check_monad_laws(&spec.inner, seed, cases, d))
}

/// Checks that contexts (holes written `var(hole)`) preserve `k`-step
/// bisimilarity of the given pairs; without `contexts`, every context up to
/// `height` is tried.
#[pyfunction]
#[pyo3(signature = (spec, pairs, contexts = None, k = 3, fuel = None, height = 2, mutate = false))]
#[allow(clippy::too_many_arguments)]
fn congruence<'py>(
    py: Python<'py>,
    spec: &PySpec,
    pairs: Vec<(String, String)>,
    contexts: Option<Vec<String>>,
    k: usize,
    fuel: Option<usize>,
    height: usize,
    mutate: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let s = &spec.inner;
    let pairs = pairs
        .iter()
        .map(|(u, v)| Ok((parse_closed(s, u)?, parse_closed(s, v)?)))
        .collect::<Result<Vec<_>, gsos_core::term::TermError>>()
        .map_err(err)?;
    let contexts = match contexts {
        Some(cs) => cs.iter().map(|c| parse_context(s, c)).collect::<Result<Vec<_>, _>>().map_err(err)?,
        None => {
            let ops: Vec<&str> = s.signature.decls().iter().map(|d| d.name.as_str()).collect();
            contexts_up_to(s, &ops, height)
        }
    };
    let mutation = mutate.then_some(Mutation::SyncDepthCut);
    let report = congruence_test(s, &pairs, &contexts, k, fuel.unwrap_or(k), mutation).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn gsos(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyLts>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(transitions, m)?)?;
    m.add_function(wrap_pyfunction!(reachable, m)?)?;
    m.add_function(wrap_pyfunction!(bisimilar, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(monad_laws, m)?)?;
    m.add_function(wrap_pyfunction!(congruence, m)?)?;
    Ok(())
}
