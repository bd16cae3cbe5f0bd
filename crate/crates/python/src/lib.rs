//! Python bindings for `cdtk`.
//!
//! Formulas travel as Polish-notation strings, D-terms as D-notation strings
//! (or the wrapper classes below), axiom assignments as `{label: formula}`
//! dicts. Tabular results come back as plain lists and dicts.

use std::collections::{BTreeMap, HashSet};
use std::time::Duration;

use pyo3::exceptions::{PyTimeoutError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use cdtk::analysis::{self, AnalysisOptions, Concordance};
use cdtk::formats::corpus::{parse_corpus, print_corpus, Corpus};
use cdtk::formats::tptp::parse_tptp_cd;
use cdtk::formats::{dnotation, polish};
use cdtk::prover::{Dedup, EnumPolicy, PolicyKind, ProveOutcome};
use cdtk::reduce::{NormalizeOptions, ReductionKind};
use cdtk::semantics::lemma_mgts;
use cdtk::{AxiomAssignment, Error, PrimLabel};

fn err(e: Error) -> PyErr {
    match e {
        Error::ResourceLimit(m) => PyTimeoutError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn perr(e: cdtk::ParseError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

/// A formula.
#[pyclass(module = "pycdtk", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Formula(cdtk::FTerm);

#[pymethods]
impl Formula {
    /// Parse Polish notation (`CpCqp`) or a first-order term (`i(p,i(q,p))`).
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        polish::parse_formula(src, &HashSet::new()).map(Formula).map_err(perr)
    }

    fn polish(&self) -> String {
        polish::print_polish(&self.0)
    }

    #[getter]
    fn tree_size(&self) -> u64 {
        self.0.tree_size()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.0.height()
    }

    /// True if `other` is an instance of this formula.
    fn subsumes(&self, other: &Formula) -> bool {
        cdtk::subsumes(&self.0, &other.0)
    }

    fn is_variant(&self, other: &Formula) -> bool {
        cdtk::variant(&self.0, &other.0)
    }

    fn __str__(&self) -> String {
        self.polish()
    }

    fn __repr__(&self) -> String {
        format!("Formula('{}')", self.polish())
    }
}

/// A D-term (proof structure).
#[pyclass(module = "pycdtk", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct DTerm(cdtk::DTerm);

#[pymethods]
impl DTerm {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        dnotation::parse(src).map(DTerm).map_err(perr)
    }

    #[getter]
    fn t_size(&self) -> u64 {
        self.0.t_size()
    }

    #[getter]
    fn c_size(&self) -> usize {
        self.0.c_size()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.0.height()
    }

    #[getter]
    fn sc_size(&self) -> u64 {
        self.0.sc_size()
    }

    fn is_prime(&self) -> bool {
        self.0.is_prime()
    }

    fn functional(&self) -> String {
        dnotation::print_functional(&self.0)
    }

    fn subterms(&self) -> Vec<DTerm> {
        self.0.subterms().into_iter().map(DTerm).collect()
    }

    fn __str__(&self) -> String {
        dnotation::print(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("DTerm('{}')", dnotation::print(&self.0))
    }
}

#[derive(FromPyObject)]
enum DTermArg {
    Term(DTerm),
    Text(String),
}

impl DTermArg {
    fn get(self) -> PyResult<cdtk::DTerm> {
        match self {
            DTermArg::Term(d) => Ok(d.0),
            DTermArg::Text(s) => dnotation::parse(&s).map_err(perr),
        }
    }
}

fn axioms_from(map: BTreeMap<String, String>) -> PyResult<AxiomAssignment> {
    let mut alpha = AxiomAssignment::new();
    for (l, f) in map {
        alpha.insert(PrimLabel::new(&l), &polish::parse_formula(&f, &HashSet::new()).map_err(perr)?);
    }
    Ok(alpha)
}

/// Most general theorem of `d`, or None if undefined.
#[pyfunction]
fn mgt(d: DTermArg, axioms: BTreeMap<String, String>) -> PyResult<Option<Formula>> {
    let alpha = axioms_from(axioms)?;
    Ok(cdtk::mgt(&d.get()?, &alpha).map_err(err)?.map(Formula))
}

/// Normalize `d` under the given reductions; returns the result and the
/// number of steps.
#[pyfunction]
#[pyo3(signature = (d, axioms, kinds = vec!["S".to_string(), "C".to_string()], restore_n = false))]
fn normalize(
    d: DTermArg,
    axioms: BTreeMap<String, String>,
    kinds: Vec<String>,
    restore_n: bool,
) -> PyResult<(DTerm, usize)> {
    let alpha = axioms_from(axioms)?;
    let kinds = kinds
        .iter()
        .map(|k| k.parse::<ReductionKind>().map_err(PyValueError::new_err))
        .collect::<PyResult<Vec<_>>>()?;
    let opts = NormalizeOptions {
        kinds,
        restore_n,
        ..Default::default()
    };
    let (nf, steps) = cdtk::normalize(&d.get()?, &alpha, &opts).map_err(err)?;
    Ok((DTerm(nf), steps.len()))
}

#[pyfunction]
fn n_simplify(d: DTermArg, axioms: BTreeMap<String, String>) -> PyResult<DTerm> {
    let alpha = axioms_from(axioms)?;
    cdtk::n_simplify(&d.get()?, &alpha).map(DTerm).map_err(err)
}

/// Number of D-terms at levels `0..=upto` of a measure
/// (`tsize`, `height`, `csize`, `prime`, `psp`).
#[pyfunction]
fn count(measure: &str, upto: usize) -> PyResult<Vec<u128>> {
    let m: cdtk::Measure = measure.parse().map_err(PyValueError::new_err)?;
    cdtk::levels::count_upto(m, upto).map_err(err)
}

/// Check the roots of a corpus; `problem` is optional TPTP text.
#[pyfunction]
#[pyo3(signature = (corpus, problem = None))]
fn check(py: Python<'_>, corpus: &str, problem: Option<&str>) -> PyResult<Py<PyAny>> {
    let c = parse_corpus(corpus).map_err(perr)?;
    let p = match problem {
        Some(src) => parse_tptp_cd(src, "problem").map_err(perr)?,
        None => cdtk::Problem::new("corpus", c.axioms.clone(), None).map_err(err)?,
    };
    let verdicts = cdtk::check_proof(&c.proof, &p).map_err(err)?;
    let roots = c.proof.expanded_roots().map_err(err)?;
    let rows: Vec<_> = verdicts
        .iter()
        .zip(&roots)
        .map(|(v, (_, d))| {
            let s = d.measure();
            serde_json::json!({
                "root": v.label.to_string(),
                "mgt": v.mgt.as_ref().map(polish::print_polish),
                "proves_goal": v.proves_goal,
                "c_size": s.c_size, "t_size": s.t_size, "height": s.height,
            })
        })
        .collect();
    json_to_py(py, &serde_json::Value::Array(rows))
}

/// Property table of a corpus as a list of dicts.
#[pyfunction]
#[pyo3(signature = (corpus, skip_regularity = false))]
fn analyze(py: Python<'_>, corpus: &str, skip_regularity: bool) -> PyResult<Py<PyAny>> {
    let c = parse_corpus(corpus).map_err(perr)?;
    let concordance = Concordance::standard();
    let opts = AnalysisOptions {
        concordance: Some(&concordance),
        skip_regularity,
        ..Default::default()
    };
    let rows = py
        .detach(|| analysis::analyze(&c.proof, &c.axioms, &opts))
        .map_err(err)?;
    json_to_py(py, &analysis::to_json(&rows))
}

/// Search for a proof of a TPTP problem. Returns the proof as corpus text,
/// or None if the levels are exhausted.
#[pyfunction]
#[pyo3(signature = (problem, policy = "psp", max_level = 40, max_ft = None, max_fh = None,
                    max_fv = None, dedup = "subsumption", cache_cap = None, use_n = false, timeout = None))]
#[allow(clippy::too_many_arguments)]
fn prove(
    py: Python<'_>,
    problem: &str,
    policy: &str,
    max_level: usize,
    max_ft: Option<u64>,
    max_fh: Option<u32>,
    max_fv: Option<usize>,
    dedup: &str,
    cache_cap: Option<usize>,
    use_n: bool,
    timeout: Option<f64>,
) -> PyResult<Option<String>> {
    let p = parse_tptp_cd(problem, "problem").map_err(perr)?;
    let kind: PolicyKind = policy.parse().map_err(PyValueError::new_err)?;
    let mut pol = EnumPolicy::new(kind, max_level);
    pol.thresholds.max_ft = max_ft;
    pol.thresholds.max_fh = max_fh;
    pol.thresholds.max_fv = max_fv;
    pol.dedup = dedup.parse::<Dedup>().map_err(PyValueError::new_err)?;
    pol.cache_cap = cache_cap;
    pol.use_n = use_n;
    if let Some(t) = timeout {
        if !(t > 0.0) {
            return Err(PyValueError::new_err("timeout must be positive"));
        }
        pol.timeout = Some(Duration::from_secs_f64(t));
    }
    match py.detach(|| cdtk::prove(&p, &pol)).map_err(err)? {
        ProveOutcome::Exhausted(_) => Ok(None),
        ProveOutcome::Proved(r) => {
            let formulas = lemma_mgts(&r.delta, &p.axioms)
                .map_err(err)?
                .into_iter()
                .filter_map(|(l, m)| m.map(|m| (l, m)))
                .collect();
            let c = Corpus {
                axioms: p.axioms.clone(),
                goals: r.delta.roots(),
                proof: r.delta.clone(),
                formulas,
            };
            Ok(Some(print_corpus(&c)))
        }
    }
}

#[pymodule]
pub fn pycdtk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<DTerm>()?;
    m.add_function(wrap_pyfunction!(mgt, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(n_simplify, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(prove, m)?)?;
    Ok(())
}
