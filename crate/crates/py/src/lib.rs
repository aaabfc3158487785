//! Python bindings: the sequence and function types plus the extraction,
//! checking, oracle, pigeonhole and refuter operations. Documents come back
//! as plain dicts mirroring the canonical JSON emitted by the CLI.

use num_bigint::BigUint;
use pyo3::IntoPyObjectExt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};

use dickson_core::canon::Value;
use dickson_core::dsl;
use dickson_core::engine;
use dickson_core::error::Error;
use dickson_core::oracle;
use dickson_core::pigeonhole;
use dickson_core::sequence::{Coloring, EngineConfig, EvalCtx, MultiFunction, Nat};
use dickson_core::unprovability;

create_exception!(
    dickson_py,
    BudgetExhausted,
    PyException,
    "The per-call evaluation budget or recursion cap ran out."
);

fn to_py_err(e: Error) -> PyErr {
    if e.is_exhaustion() {
        BudgetExhausted::new_err(e.to_string())
    } else if matches!(e, Error::Parse { .. } | Error::InvalidArg(_)) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn config(budget: Option<u64>) -> EngineConfig {
    match budget {
        Some(b) => EngineConfig::with_budget(b),
        None => EngineConfig::default(),
    }
}

fn value_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    match v {
        Value::Nat(n) => n.clone().into_py_any(py),
        Value::Bool(b) => b.into_py_any(py),
        Value::Str(s) => s.into_py_any(py),
        Value::Arr(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Obj(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, value_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn py_to_value(v: &Bound<'_, PyAny>) -> PyResult<Value> {
    if let Ok(b) = v.cast::<PyBool>() {
        return Ok(Value::Bool(b.is_true()));
    }
    if let Ok(n) = v.extract::<BigUint>() {
        return Ok(Value::Nat(n));
    }
    if let Ok(s) = v.cast::<PyString>() {
        return Ok(Value::Str(s.to_str()?.to_string()));
    }
    if let Ok(list) = v.cast::<PyList>() {
        let mut items = Vec::with_capacity(list.len());
        for item in list.iter() {
            items.push(py_to_value(&item)?);
        }
        return Ok(Value::Arr(items));
    }
    if let Ok(dict) = v.cast::<PyDict>() {
        let mut map = std::collections::BTreeMap::new();
        for (k, val) in dict.iter() {
            map.insert(k.extract::<String>()?, py_to_value(&val)?);
        }
        return Ok(Value::Obj(map));
    }
    Err(PyValueError::new_err(
        "documents may contain only naturals, booleans, strings, lists and dicts",
    ))
}

/// A total sequence over the naturals, built from a description or from a
/// Python callable.
#[pyclass(name = "Sequence", frozen)]
struct PySeq {
    inner: dickson_core::Sequence,
}

#[pymethods]
impl PySeq {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dsl::parse_sequence(text).map_err(to_py_err)?,
        })
    }

    /// Wrap a callable `int -> int`. Totality is the caller's promise;
    /// failures surface as errors at evaluation time.
    #[staticmethod]
    fn from_callable(callable: Py<PyAny>) -> Self {
        let inner = dickson_core::Sequence::from_fn("python-callable", move |n: &Nat| {
            Python::attach(|py| -> Result<Nat, Error> {
                let out = callable
                    .call1(py, (n.clone(),))
                    .map_err(|e| Error::Rule(e.to_string()))?;
                out.extract::<BigUint>(py)
                    .map_err(|e| Error::Rule(format!("callable must return a natural: {e}")))
            })
        });
        Self { inner }
    }

    #[pyo3(signature = (n, budget = None))]
    fn eval(&self, n: BigUint, budget: Option<u64>) -> PyResult<BigUint> {
        let ctx = EvalCtx::new(&config(budget));
        self.inner.eval(&n, &ctx).map_err(to_py_err)
    }

    fn describe(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sequence({})", self.inner)
    }
}

/// A total function of two or three natural arguments.
#[pyclass(name = "Function", frozen)]
struct PyFunc {
    inner: MultiFunction,
}

#[pymethods]
impl PyFunc {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dsl::parse_multifunction(text).map_err(to_py_err)?,
        })
    }

    #[staticmethod]
    fn from_callable(arity: usize, callable: Py<PyAny>) -> PyResult<Self> {
        let inner = MultiFunction::from_fn(arity, "python-callable", move |args: &[Nat]| {
            Python::attach(|py| -> Result<Nat, Error> {
                let tuple: Vec<BigUint> = args.to_vec();
                let out = callable
                    .call1(py, (tuple,))
                    .map_err(|e| Error::Rule(e.to_string()))?;
                out.extract::<BigUint>(py)
                    .map_err(|e| Error::Rule(format!("callable must return a natural: {e}")))
            })
        })
        .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[pyo3(signature = (args, budget = None))]
    fn eval(&self, args: Vec<BigUint>, budget: Option<u64>) -> PyResult<BigUint> {
        let ctx = EvalCtx::new(&config(budget));
        self.inner.eval(&args, &ctx).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!("Function({})", self.inner)
    }
}

#[derive(FromPyObject)]
enum SeqArg<'py> {
    Obj(PyRef<'py, PySeq>),
    Text(String),
}

impl SeqArg<'_> {
    fn build(&self) -> PyResult<dickson_core::Sequence> {
        match self {
            SeqArg::Obj(o) => Ok(o.inner.clone()),
            SeqArg::Text(t) => dsl::parse_sequence(t).map_err(to_py_err),
        }
    }
}

fn build_seqs(args: &[SeqArg<'_>]) -> PyResult<Vec<dickson_core::Sequence>> {
    args.iter().map(SeqArg::build).collect()
}

#[derive(FromPyObject)]
enum FuncArg<'py> {
    Obj(PyRef<'py, PyFunc>),
    Text(String),
}

impl FuncArg<'_> {
    fn build(&self) -> PyResult<MultiFunction> {
        match self {
            FuncArg::Obj(o) => Ok(o.inner.clone()),
            FuncArg::Text(t) => dsl::parse_multifunction(t).map_err(to_py_err),
        }
    }
}

/// Extract a common good set of size `l` with its bound certificate.
#[pyfunction]
#[pyo3(signature = (seqs, l, budget = None))]
fn witness(
    py: Python<'_>,
    seqs: Vec<SeqArg<'_>>,
    l: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let seqs = build_seqs(&seqs)?;
    let w = engine::dl_k_l(&seqs, l, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &w.to_value(None))
}

/// Re-check a witness document (dict or canonical JSON text).
#[pyfunction]
#[pyo3(signature = (seqs, document, budget = None))]
fn certify(
    py: Python<'_>,
    seqs: Vec<SeqArg<'_>>,
    document: &Bound<'_, PyAny>,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let seqs = build_seqs(&seqs)?;
    let value = if let Ok(text) = document.cast::<PyString>() {
        dickson_core::canon::parse(text.to_str()?).map_err(to_py_err)?
    } else {
        py_to_value(document)?
    };
    let w = engine::Witness::from_value(&value).map_err(to_py_err)?;
    let verdict = engine::check_certificate(&seqs, &w.good, &w.cert, &config(budget));
    value_to_py(py, &verdict.to_value())
}

/// Index `i ≤ Σ_{j<n} a(j)` with `a(i) ≤ a(i+n)`.
#[pyfunction]
#[pyo3(signature = (seq, n, budget = None))]
fn gap_pair(
    py: Python<'_>,
    seq: SeqArg<'_>,
    n: BigUint,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let s = seq.build()?;
    let g = engine::gap_pair(&s, &n, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &g.to_value())
}

/// Exhaustive lexicographically-least witness search up to `horizon`.
#[pyfunction]
#[pyo3(signature = (seqs, l, horizon, budget = None))]
fn minimal_good_set(
    py: Python<'_>,
    seqs: Vec<SeqArg<'_>>,
    l: u64,
    horizon: BigUint,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let seqs = build_seqs(&seqs)?;
    let report =
        oracle::minimal_good_set(&seqs, l, &horizon, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &report.to_value())
}

/// Engine run plus exhaustive search with the extracted bound as horizon.
#[pyfunction]
#[pyo3(signature = (seqs, l, horizon = None, budget = None))]
fn oracle_report(
    py: Python<'_>,
    seqs: Vec<SeqArg<'_>>,
    l: u64,
    horizon: Option<BigUint>,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let seqs = build_seqs(&seqs)?;
    let (report, _) =
        oracle::oracle_report(&seqs, l, horizon.as_ref(), &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &report.to_value())
}

/// Check that no pair of indices up to `n_max` is good for the whole
/// descending family.
#[pyfunction]
fn counterexample_check(py: Python<'_>, n_max: u64) -> PyResult<Py<PyAny>> {
    let c = oracle::counterexample_family_check(n_max).map_err(to_py_err)?;
    value_to_py(py, &c.to_value())
}

/// Bound-tightness rows for a named family, as a list of dicts.
#[pyfunction]
#[pyo3(signature = (family, params, l, jobs = 1, budget = None))]
fn tightness(
    py: Python<'_>,
    family: &str,
    params: Vec<u64>,
    l: u64,
    jobs: usize,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let family = oracle::Family::parse(family).map_err(to_py_err)?;
    let rows = oracle::tightness_experiment(family, &params, l, jobs, &config(budget))
        .map_err(to_py_err)?;
    let list = PyList::empty(py);
    for row in &rows {
        list.append(value_to_py(py, &row.to_value())?)?;
    }
    list.into_py_any(py)
}

/// Monochromatic run of length `l` under a 2-coloring.
#[pyfunction]
#[pyo3(signature = (chi, l, budget = None))]
fn pigeonhole_run(
    py: Python<'_>,
    chi: SeqArg<'_>,
    l: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let coloring = Coloring::new(chi.build()?);
    let r = pigeonhole::ph2_from_dl(&coloring, l, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &r.to_value())
}

/// Finite counting scan over the first `(l-1)·m + 1` values.
#[pyfunction]
#[pyo3(signature = (seq, m, l, budget = None))]
fn mono_run(
    py: Python<'_>,
    seq: SeqArg<'_>,
    m: BigUint,
    l: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let s = seq.build()?;
    let r = pigeonhole::mono_run(&s, &m, l, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &r.to_value())
}

/// Equal-value run below the threshold or a crossing above it.
#[pyfunction]
#[pyo3(signature = (a, b, m, l, budget = None))]
fn dichotomy(
    py: Python<'_>,
    a: SeqArg<'_>,
    b: SeqArg<'_>,
    m: BigUint,
    l: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let a = a.build()?;
    let b = b.build()?;
    let r = unprovability::dichotomy_lemma(&a, &b, &m, l, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &r.to_value())
}

/// Chain of `l` points on which `f` weakly increases while no earlier point
/// is dominated by a later one.
#[pyfunction]
#[pyo3(signature = (f, l, m = None, budget = None))]
fn incomparable_chain(
    py: Python<'_>,
    f: FuncArg<'_>,
    l: u64,
    m: Option<BigUint>,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let f = f.build()?;
    let m = m.unwrap_or_default();
    let c = unprovability::incomparable_chain(&f, l, &m, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &c.to_value())
}

/// Incomparable pair of triples on which both functions weakly increase.
#[pyfunction]
#[pyo3(signature = (f1, f2, floor = None, budget = None))]
fn incomparable_triples(
    py: Python<'_>,
    f1: FuncArg<'_>,
    f2: FuncArg<'_>,
    floor: Option<BigUint>,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let f1 = f1.build()?;
    let f2 = f2.build()?;
    let floor = floor.unwrap_or_else(|| BigUint::from(1u32));
    let w = unprovability::incomparable_triples(&f1, &f2, &floor, &config(budget))
        .map_err(to_py_err)?;
    value_to_py(py, &w.to_value())
}

/// Refutation report for a candidate one-step reduction on pairs.
#[pyfunction]
#[pyo3(signature = (f, l, trials = 1, budget = None))]
fn refute_2d(
    py: Python<'_>,
    f: FuncArg<'_>,
    l: u64,
    trials: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let f = f.build()?;
    let r = unprovability::one_step_refute_2d(&f, l, trials, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &r.to_value())
}

/// Refutation report for a candidate one-step reduction on triples.
#[pyfunction]
#[pyo3(signature = (f1, f2, trials = 1, budget = None))]
fn refute_3d(
    py: Python<'_>,
    f1: FuncArg<'_>,
    f2: FuncArg<'_>,
    trials: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let f1 = f1.build()?;
    let f2 = f2.build()?;
    let r =
        unprovability::one_step_refute_3d(&f1, &f2, trials, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &r.to_value())
}

/// Violation witness for a claimed lexicographic-order embedding.
#[pyfunction]
#[pyo3(signature = (f, budget = None))]
fn lex_refute(py: Python<'_>, f: FuncArg<'_>, budget: Option<u64>) -> PyResult<Py<PyAny>> {
    let f = f.build()?;
    let v = unprovability::lex_embed_refute(&f, &config(budget)).map_err(to_py_err)?;
    value_to_py(py, &v.to_value())
}

/// Position where a claimed strictly-increasing-below-`n` run breaks.
#[pyfunction]
fn bounded_ascent_refute(py: Python<'_>, n: BigUint, run: Vec<BigUint>) -> PyResult<Py<PyAny>> {
    let v = unprovability::bounded_ascent_refute(&n, &run).map_err(to_py_err)?;
    value_to_py(py, &v.to_value())
}

#[pymodule]
fn dickson_py(py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeq>()?;
    m.add_class::<PyFunc>()?;
    m.add("BudgetExhausted", py.get_type::<BudgetExhausted>())?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(gap_pair, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_good_set, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_report, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_check, m)?)?;
    m.add_function(wrap_pyfunction!(tightness, m)?)?;
    m.add_function(wrap_pyfunction!(pigeonhole_run, m)?)?;
    m.add_function(wrap_pyfunction!(mono_run, m)?)?;
    m.add_function(wrap_pyfunction!(dichotomy, m)?)?;
    m.add_function(wrap_pyfunction!(incomparable_chain, m)?)?;
    m.add_function(wrap_pyfunction!(incomparable_triples, m)?)?;
    m.add_function(wrap_pyfunction!(refute_2d, m)?)?;
    m.add_function(wrap_pyfunction!(refute_3d, m)?)?;
    m.add_function(wrap_pyfunction!(lex_refute, m)?)?;
    m.add_function(wrap_pyfunction!(bounded_ascent_refute, m)?)?;
    Ok(())
}
