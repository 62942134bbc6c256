//! Python bindings: compile constraints, run detectors and monitors, and
//! build final detectors from Python predicates and enumerations.

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;

use coalmon::bisim::bisimilar;
use coalmon::cli::VerdictReport;
use coalmon::detector::{anamorphism_regular, detector_from_explicit_set, final_step};
use coalmon::families::{
    check_universal_family, decidable_detector, re_detector, DecisionProcedure, Enumerator,
    FamilyCheck,
};
use coalmon::monitor::{monitor_lasso, monitor_lasso_handle, monitor_online, Feed};
use coalmon::speclang::{self, ConstraintSpec};
use coalmon::{
    FiniteDetector, FiniteWordSet, MonitorVerdict, OnlineMonitor, PrefixFreeSet, Reaction, Step,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(coalmon, BudgetExhausted, PyRuntimeError);

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// The first exception raised by a Python callback, kept until the Rust
/// step that triggered it returns.
type ErrorSlot = Rc<RefCell<Option<PyErr>>>;

fn take_error(slot: &ErrorSlot) -> PyResult<()> {
    match slot.borrow_mut().take() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[pyclass(name = "Alphabet", module = "coalmon", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAlphabet(coalmon::Alphabet);

#[pymethods]
impl PyAlphabet {
    #[new]
    fn new(names: Vec<String>) -> PyResult<Self> {
        coalmon::Alphabet::new(names)
            .map(PyAlphabet)
            .map_err(value_error)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Alphabet({:?})", self.0.names())
    }
}

fn parse_words(alphabet: &coalmon::Alphabet, words: &[String]) -> PyResult<FiniteWordSet> {
    words
        .iter()
        .map(|w| alphabet.parse_word(w).map_err(value_error))
        .collect()
}

fn format_words(alphabet: &coalmon::Alphabet, set: &FiniteWordSet) -> Vec<String> {
    set.iter().map(|w| alphabet.format_word(w)).collect()
}

fn verdict_dict<'py>(
    py: Python<'py>,
    v: &MonitorVerdict,
    alphabet: &coalmon::Alphabet,
) -> PyResult<Bound<'py, PyDict>> {
    report_dict(py, &VerdictReport::from_verdict(v, alphabet))
}

fn report_dict<'py>(py: Python<'py>, r: &VerdictReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict)?;
    d.set_item("prefix_len", r.prefix_len)?;
    d.set_item("ana_value", r.ana_value)?;
    d.set_item("bad_prefix", r.bad_prefix.clone())?;
    d.set_item("steps_consumed", r.steps_consumed)?;
    Ok(d)
}

#[pyclass(name = "Spec", module = "coalmon", frozen)]
struct PySpec(ConstraintSpec);

#[pymethods]
impl PySpec {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn alphabet(&self) -> PyAlphabet {
        PyAlphabet(self.0.alphabet.clone())
    }

    #[getter]
    fn pattern(&self) -> String {
        self.0.pattern.pretty(&self.0.alphabet)
    }

    /// Whether some word of the pattern has a proper prefix in the pattern.
    fn kernel_changes_language(&self) -> PyResult<bool> {
        speclang::kernel_changes_language(&self.0).map_err(value_error)
    }

    fn compile(&self) -> PyResult<PyDetector> {
        let (detector, initial) = speclang::compile(&self.0).map_err(value_error)?;
        Ok(PyDetector {
            detector: Arc::new(detector),
            initial,
        })
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Spec({:?})", self.0.to_string())
    }
}

#[pyfunction]
#[pyo3(signature = (text, name = "spec"))]
fn parse_spec(text: &str, name: &str) -> PyResult<PySpec> {
    speclang::parse_named(name, text)
        .map(PySpec)
        .map_err(value_error)
}

#[pyfunction]
fn compile_spec(text: &str) -> PyResult<PyDetector> {
    parse_spec(text, "spec")?.compile()
}

/// A finite detector with a designated initial state.
#[pyclass(name = "Detector", module = "coalmon", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDetector {
    detector: Arc<FiniteDetector>,
    initial: usize,
}

impl PyDetector {
    fn state(&self, state: Option<usize>) -> PyResult<usize> {
        let x = state.unwrap_or(self.initial);
        self.detector.check_state(x).map_err(value_error)?;
        Ok(x)
    }
}

#[pymethods]
impl PyDetector {
    #[staticmethod]
    #[pyo3(signature = (text, initial = 0))]
    fn from_text(text: &str, initial: usize) -> PyResult<Self> {
        let detector = FiniteDetector::from_text(text).map_err(value_error)?;
        detector.check_state(initial).map_err(value_error)?;
        Ok(PyDetector {
            detector: Arc::new(detector),
            initial,
        })
    }

    /// The trie detector whose minimal violations are exactly `words`.
    #[staticmethod]
    fn from_words(alphabet: &PyAlphabet, words: Vec<String>) -> PyResult<Self> {
        let set = parse_words(&alphabet.0, &words)?;
        let (detector, initial) =
            detector_from_explicit_set(&alphabet.0, &set).map_err(value_error)?;
        Ok(PyDetector {
            detector: Arc::new(detector),
            initial,
        })
    }

    #[getter]
    fn alphabet(&self) -> PyAlphabet {
        PyAlphabet(self.detector.alphabet().clone())
    }

    #[getter]
    fn initial(&self) -> usize {
        self.initial
    }

    fn __len__(&self) -> usize {
        self.detector.len()
    }

    /// The next state, or `None` on a fault.
    #[pyo3(signature = (symbol, state = None))]
    fn step(&self, symbol: &str, state: Option<usize>) -> PyResult<Option<usize>> {
        let n = self
            .detector
            .alphabet()
            .symbol(symbol)
            .map_err(value_error)?;
        match self
            .detector
            .step(self.state(state)?, n)
            .map_err(value_error)?
        {
            Step::Fault => Ok(None),
            Step::Next(y) => Ok(Some(y)),
        }
    }

    /// Runs a nonempty word; `None` if it faults along the way.
    #[pyo3(signature = (word, state = None))]
    fn extend(&self, word: &str, state: Option<usize>) -> PyResult<Option<usize>> {
        let u = self
            .detector
            .alphabet()
            .parse_word(word)
            .map_err(value_error)?;
        match self
            .detector
            .extend(self.state(state)?, &u)
            .map_err(value_error)?
        {
            Step::Fault => Ok(None),
            Step::Next(y) => Ok(Some(y)),
        }
    }

    #[pyo3(signature = (depth, state = None))]
    fn minimal_violation_words(&self, depth: usize, state: Option<usize>) -> PyResult<Vec<String>> {
        let words = self
            .detector
            .minimal_violation_words(self.state(state)?, depth)
            .map_err(value_error)?;
        Ok(format_words(self.detector.alphabet(), &words))
    }

    /// The minimal detector for the initial state's language.
    fn canonical(&self) -> PyResult<PyDetector> {
        let (detector, initial) = self.detector.canonical(self.initial).map_err(value_error)?;
        Ok(PyDetector {
            detector: Arc::new(detector),
            initial,
        })
    }

    fn to_text(&self) -> String {
        self.detector.to_text()
    }

    /// Whether the two initial states have the same minimal violations.
    fn equivalent(&self, other: &PyDetector) -> PyResult<bool> {
        bisimilar(&self.detector, self.initial, &other.detector, other.initial).map_err(value_error)
    }

    /// Verdict on the stream `u v v v ...` written `"u ; v"`.
    fn monitor_lasso<'py>(&self, py: Python<'py>, lasso: &str) -> PyResult<Bound<'py, PyDict>> {
        let alphabet = self.detector.alphabet();
        let s = alphabet.parse_lasso(lasso).map_err(value_error)?;
        let v = monitor_lasso(&self.detector, self.initial, &s).map_err(value_error)?;
        verdict_dict(py, &v, alphabet)
    }

    /// The initial state as a state of the final detector.
    fn final_state(&self) -> PyResult<PyFinalDetector> {
        let regular = anamorphism_regular(&self.detector, self.initial).map_err(value_error)?;
        Ok(PyFinalDetector::new(
            PrefixFreeSet::Regular(regular),
            Rc::default(),
        ))
    }

    fn monitor(&self) -> PyResult<PyMonitor> {
        self.final_state()?.monitor()
    }

    fn __repr__(&self) -> String {
        format!(
            "Detector(states={}, initial={})",
            self.detector.len(),
            self.initial
        )
    }
}

/// A state of the final detector: a prefix-free violation language given
/// explicitly, by a decision procedure, or by an enumeration.
#[pyclass(
    name = "FinalDetector",
    module = "coalmon",
    unsendable,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyFinalDetector {
    set: PrefixFreeSet,
    errors: ErrorSlot,
}

impl PyFinalDetector {
    fn new(set: PrefixFreeSet, errors: ErrorSlot) -> Self {
        PyFinalDetector { set, errors }
    }
}

#[pymethods]
impl PyFinalDetector {
    #[staticmethod]
    fn explicit(alphabet: &PyAlphabet, words: Vec<String>) -> PyResult<Self> {
        let set = parse_words(&alphabet.0, &words)?;
        let p = PrefixFreeSet::explicit(alphabet.0.clone(), set).map_err(value_error)?;
        Ok(PyFinalDetector::new(p, Rc::default()))
    }

    /// `predicate(word)` decides membership of a word given as a list of
    /// symbol names. With `audit`, each step also checks that no proper
    /// prefix of the history was a member.
    #[staticmethod]
    #[pyo3(signature = (alphabet, predicate, audit = true))]
    fn decidable(alphabet: &PyAlphabet, predicate: Py<PyAny>, audit: bool) -> Self {
        let errors: ErrorSlot = Rc::default();
        let slot = errors.clone();
        let names = alphabet.0.clone();
        let procedure = DecisionProcedure::new(move |w| {
            Python::attach(|py| {
                let word: Vec<&str> = w.iter().map(|&s| names.name(s)).collect();
                match predicate
                    .bind(py)
                    .call1((word,))
                    .and_then(|r| r.is_truthy())
                {
                    Ok(b) => b,
                    Err(e) => {
                        slot.borrow_mut().get_or_insert(e);
                        false
                    }
                }
            })
        });
        PyFinalDetector::new(
            decidable_detector(alphabet.0.clone(), procedure, audit),
            errors,
        )
    }

    /// Members come from `iterable`, each a list of symbol names; a step
    /// gives up after `budget` rounds of enumeration.
    #[staticmethod]
    fn enumerated(
        alphabet: &PyAlphabet,
        iterable: &Bound<'_, PyAny>,
        budget: usize,
    ) -> PyResult<Self> {
        let errors: ErrorSlot = Rc::default();
        let slot = errors.clone();
        let names = alphabet.0.clone();
        let iterator: Py<PyAny> = iterable.try_iter()?.into_any().unbind();
        let source = std::iter::from_fn(move || {
            Python::attach(|py| {
                let next = match iterator.bind(py).call_method0("__next__") {
                    Ok(item) => item,
                    Err(e) if e.is_instance_of::<pyo3::exceptions::PyStopIteration>(py) => {
                        return None
                    }
                    Err(e) => {
                        slot.borrow_mut().get_or_insert(e);
                        return None;
                    }
                };
                let parsed = next.extract::<Vec<String>>().and_then(|ws| {
                    ws.iter()
                        .map(|n| names.symbol(n).map_err(value_error))
                        .collect::<PyResult<Vec<_>>>()
                });
                match parsed {
                    Ok(symbols) => Some(coalmon::Word::new(symbols)),
                    Err(e) => {
                        slot.borrow_mut().get_or_insert(e);
                        None
                    }
                }
            })
        });
        let p = re_detector(Enumerator::new(alphabet.0.clone(), source), budget)
            .map_err(value_error)?;
        Ok(PyFinalDetector::new(p, errors))
    }

    #[getter]
    fn alphabet(&self) -> PyAlphabet {
        PyAlphabet(self.set.alphabet().clone())
    }

    /// The successor state, or `None` on a fault. Raises `BudgetExhausted`
    /// when an enumeration could not settle the step.
    fn step(&self, symbol: &str) -> PyResult<Option<PyFinalDetector>> {
        let n = self.set.alphabet().symbol(symbol).map_err(value_error)?;
        let reaction = final_step(&self.set, n);
        take_error(&self.errors)?;
        match reaction.map_err(value_error)? {
            Reaction::Fault => Ok(None),
            Reaction::Next(next) => Ok(Some(PyFinalDetector::new(next, self.errors.clone()))),
            Reaction::Unknown { steps } => Err(BudgetExhausted::new_err(steps)),
        }
    }

    #[pyo3(signature = (lasso, budget = 10_000))]
    fn monitor_lasso<'py>(
        &self,
        py: Python<'py>,
        lasso: &str,
        budget: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let alphabet = self.set.alphabet();
        let s = alphabet.parse_lasso(lasso).map_err(value_error)?;
        let v = monitor_lasso_handle(&self.set, &s, budget);
        take_error(&self.errors)?;
        verdict_dict(py, &v.map_err(value_error)?, alphabet)
    }

    fn monitor(&self) -> PyResult<PyMonitor> {
        Ok(PyMonitor {
            inner: monitor_online(self.set.clone()),
            errors: self.errors.clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!("FinalDetector({:?})", self.set)
    }
}

/// Consumes a trace one symbol at a time.
#[pyclass(name = "Monitor", module = "coalmon", unsendable)]
struct PyMonitor {
    inner: OnlineMonitor<PrefixFreeSet>,
    errors: ErrorSlot,
}

#[pymethods]
impl PyMonitor {
    /// Feeds one symbol and returns `"ok"`, `"violation"` or `"unknown"`.
    fn feed(&mut self, symbol: &str) -> PyResult<&'static str> {
        let n = self
            .inner
            .handle()
            .alphabet()
            .symbol(symbol)
            .map_err(value_error)?;
        let fed = self.inner.feed(n);
        take_error(&self.errors)?;
        Ok(match fed.map_err(value_error)? {
            Feed::Ok => "ok",
            Feed::Violation { .. } => "violation",
            Feed::Unknown { .. } => "unknown",
        })
    }

    /// Feeds symbols until a terminal verdict or the end of the trace.
    fn run<'py>(&mut self, py: Python<'py>, trace: Vec<String>) -> PyResult<Bound<'py, PyDict>> {
        for symbol in &trace {
            if self.feed(symbol)? != "ok" {
                break;
            }
        }
        self.verdict(py)
    }

    #[getter]
    fn consumed(&self) -> Vec<String> {
        let alphabet = self.inner.handle().alphabet();
        self.inner
            .consumed()
            .iter()
            .map(|&s| alphabet.name(s).to_string())
            .collect()
    }

    /// The verdict so far; `ok_so_far` until the monitor terminates.
    fn verdict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        match self.inner.verdict() {
            Some(v) => verdict_dict(py, &v, self.inner.handle().alphabet()),
            None => report_dict(py, &VerdictReport::ok_so_far(self.inner.consumed().len())),
        }
    }
}

/// `None` when the family is closed, else `(set, symbol)` naming a member
/// whose derivative by `symbol` is missing.
#[pyfunction]
fn check_family(
    alphabet: &PyAlphabet,
    sets: Vec<Vec<String>>,
) -> PyResult<Option<(Vec<String>, String)>> {
    let family = sets
        .iter()
        .map(|s| parse_words(&alphabet.0, s))
        .collect::<PyResult<Vec<_>>>()?;
    match check_universal_family(&alphabet.0, &family).map_err(value_error)? {
        FamilyCheck::Closed => Ok(None),
        FamilyCheck::NotClosed { set, symbol } => Ok(Some((
            format_words(&alphabet.0, &set),
            alphabet.0.name(symbol).to_string(),
        ))),
    }
}

#[pymodule(name = "coalmon")]
fn coalmon_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlphabet>()?;
    m.add_class::<PySpec>()?;
    m.add_class::<PyDetector>()?;
    m.add_class::<PyFinalDetector>()?;
    m.add_class::<PyMonitor>()?;
    m.add("BudgetExhausted", m.py().get_type::<BudgetExhausted>())?;
    m.add_function(wrap_pyfunction!(parse_spec, m)?)?;
    m.add_function(wrap_pyfunction!(compile_spec, m)?)?;
    m.add_function(wrap_pyfunction!(check_family, m)?)?;
    Ok(())
}
