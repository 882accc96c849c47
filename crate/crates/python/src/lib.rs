//! Python bindings: `import critbase`.

use critbase::critical::{self, CriticalResult, Params};
use critbase::numerics;
use critbase::uniqueness::{self, Certificate};
use critbase::words::{self, Directive, FiniteWord, Subst};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: critbase::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An eventually periodic word written `pre(per)`.
#[pyclass(name = "EpWord", frozen, eq, ord, hash)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyEpWord(critbase::EpWord);

#[pymethods]
impl PyEpWord {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        words::parse_word(text).map(PyEpWord).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("EpWord('{}')", self.0)
    }

    #[getter]
    fn preperiod(&self) -> Vec<u8> {
        self.0.preperiod().to_vec()
    }

    #[getter]
    fn period(&self) -> Vec<u8> {
        self.0.period().to_vec()
    }

    fn prefix(&self, n: usize) -> Vec<u8> {
        self.0.prefix(n)
    }

    /// Image under a directive such as `"MRL"`.
    fn apply(&self, directive: &str) -> PyResult<Self> {
        let d: Directive = directive.parse().map_err(err)?;
        d.morphism().apply(&self.0).map(PyEpWord).map_err(err)
    }

    fn orbit_inf(&self) -> Self {
        PyEpWord(self.0.orbit_inf())
    }

    fn orbit_sup(&self) -> Self {
        PyEpWord(self.0.orbit_sup())
    }

    fn orbit_inf1(&self) -> PyResult<Self> {
        self.0.orbit_inf1().map(PyEpWord).map_err(err)
    }

    fn orbit_sup0(&self) -> PyResult<Self> {
        self.0.orbit_sup0().map(PyEpWord).map_err(err)
    }

    /// `(v, offset)` with `self = offset · s(v)`.
    fn desubstitute(&self, s: char) -> PyResult<(Self, String)> {
        let s = Subst::try_from(s).map_err(err)?;
        let (v, offset) = words::desubstitute(&self.0, s).map_err(err)?;
        Ok((PyEpWord(v), offset.to_string()))
    }
}

#[derive(FromPyObject)]
enum WordArg {
    Word(PyEpWord),
    Text(String),
}

impl WordArg {
    fn get(self) -> PyResult<critbase::EpWord> {
        match self {
            WordArg::Word(w) => Ok(w.0),
            WordArg::Text(s) => words::parse_word(&s).map_err(err),
        }
    }
}

fn params(tol: f64, tau: f64, max_depth: usize) -> Params {
    Params { tol, tau, max_depth }
}

fn result_dict<'py>(py: Python<'py>, r: &CriticalResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("m", r.m)?;
    d.set_item("beta", r.beta)?;
    d.set_item("case", r.case.kind.to_string())?;
    d.set_item("directive", r.case.directive.to_string())?;
    d.set_item("witness", r.case.witness.to_string())?;
    d.set_item("bracket_width", r.bracket_width)?;
    d.set_item("depth_used", r.depth_used)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (word, m, tol = numerics::DEFAULT_TOL))]
fn solve_f(word: WordArg, m: f64, tol: f64) -> PyResult<f64> {
    numerics::solve_f(&word.get()?, m, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (word, m, tol = numerics::DEFAULT_TOL))]
fn solve_g(word: WordArg, m: f64, tol: f64) -> PyResult<f64> {
    numerics::solve_g(&word.get()?, m, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (word, tol = numerics::DEFAULT_TOL))]
fn solve_mu(word: WordArg, tol: f64) -> PyResult<f64> {
    numerics::solve_mu(&word.get()?, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (directive, tol = numerics::DEFAULT_TOL))]
fn mu_periodic_closed_form(directive: &str, tol: f64) -> PyResult<f64> {
    let d: Directive = directive.parse().map_err(err)?;
    numerics::mu_periodic_closed_form(&d, tol).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (prefix_len = 64, tol = 1e-9))]
fn komornik_loreti_root(prefix_len: usize, tol: f64) -> PyResult<f64> {
    numerics::komornik_loreti_root(prefix_len, tol).map_err(err)
}

#[pyfunction]
fn limit_word_prefix(directive: &str, n: usize) -> PyResult<String> {
    let d: Directive = directive.parse().map_err(err)?;
    words::limit_word_prefix(&d, n).map(|w| w.to_string()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, tol = numerics::DEFAULT_TOL, tau = numerics::DEFAULT_TAU, max_depth = critical::DEFAULT_MAX_DEPTH))]
fn critical_l(py: Python<'_>, m: f64, tol: f64, tau: f64, max_depth: usize) -> PyResult<Py<PyDict>> {
    let r = critical::critical_l(m, params(tol, tau, max_depth)).map_err(err)?;
    Ok(result_dict(py, &r)?.unbind())
}

#[pyfunction]
#[pyo3(signature = (m, tol = numerics::DEFAULT_TOL, tau = numerics::DEFAULT_TAU, max_depth = critical::DEFAULT_MAX_DEPTH))]
fn critical_g(py: Python<'_>, m: f64, tol: f64, tau: f64, max_depth: usize) -> PyResult<Py<PyDict>> {
    let r = critical::critical_g(m, params(tol, tau, max_depth)).map_err(err)?;
    Ok(result_dict(py, &r)?.unbind())
}

type Row = (f64, f64, f64, String, String);

/// Rows `(m, G, L, caseG, caseL)`.
#[pyfunction]
#[pyo3(signature = (start, stop, step, tol = numerics::DEFAULT_TOL, tau = numerics::DEFAULT_TAU, max_depth = critical::DEFAULT_MAX_DEPTH))]
fn scan(
    start: f64,
    stop: f64,
    step: f64,
    tol: f64,
    tau: f64,
    max_depth: usize,
) -> PyResult<Vec<Row>> {
    let rows = critical::scan(start, stop, step, params(tol, tau, max_depth)).map_err(err)?;
    Ok(rows.into_iter().map(|r| (r.m, r.g, r.l, r.case_g, r.case_l)).collect())
}

/// `"unique"`, `"not_unique"` or `"boundary"`.
#[pyfunction]
#[pyo3(signature = (word, beta, m, tau = numerics::DEFAULT_TAU))]
fn is_unique(word: WordArg, beta: f64, m: f64, tau: f64) -> PyResult<&'static str> {
    let v = uniqueness::is_unique_with(&word.get()?, beta, m, tau).map_err(err)?;
    Ok(match v.status {
        uniqueness::Status::Unique => "unique",
        uniqueness::Status::NotUnique => "not_unique",
        uniqueness::Status::Boundary => "boundary",
    })
}

/// The two holes as `((a1, b1), (a2, b2))`.
#[pyfunction]
fn holes(beta: f64, m: f64) -> PyResult<((f64, f64), (f64, f64))> {
    let g = uniqueness::holes(beta, m).map_err(err)?;
    Ok(((g.h1_lo, g.h1_hi), (g.h2_lo, g.h2_hi)))
}

#[pyfunction]
#[pyo3(signature = (v, w, beta, m, horizon = 64))]
fn pair_certificate(v: &str, w: &str, beta: f64, m: f64, horizon: usize) -> PyResult<bool> {
    let (v, w): (FiniteWord, FiniteWord) = (v.parse().map_err(err)?, w.parse().map_err(err)?);
    let c = uniqueness::pair_certificate(&v, &w, beta, m, horizon).map_err(err)?;
    Ok(c == Certificate::Certified)
}

#[pyfunction]
fn hutchinson_dim(len_v: usize, len_w: usize, beta: f64) -> PyResult<f64> {
    uniqueness::hutchinson_dim(len_v, len_w, beta).map_err(err)
}

#[pymodule]
#[pyo3(name = "critbase")]
fn critbase_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEpWord>()?;
    m.add_function(wrap_pyfunction!(solve_f, m)?)?;
    m.add_function(wrap_pyfunction!(solve_g, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mu, m)?)?;
    m.add_function(wrap_pyfunction!(mu_periodic_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(komornik_loreti_root, m)?)?;
    m.add_function(wrap_pyfunction!(limit_word_prefix, m)?)?;
    m.add_function(wrap_pyfunction!(critical_l, m)?)?;
    m.add_function(wrap_pyfunction!(critical_g, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(is_unique, m)?)?;
    m.add_function(wrap_pyfunction!(holes, m)?)?;
    m.add_function(wrap_pyfunction!(pair_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(hutchinson_dim, m)?)?;
    Ok(())
}
