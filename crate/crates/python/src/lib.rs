//! Python module `qfa`: witnesses, evaluation, conversions and sign-rank
//! tools over the `qfa-core` crate.
//!
//! Automata travel as [`Automaton`] objects that round-trip through the same
//! JSON documents the CLI reads and writes; structured reports come back as
//! plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::{json, Value};

use qfa_core::automata::{enumerate_words, member, CutpointSpec, Word};
use qfa_core::io::{self, AnyAutomaton};
use qfa_core::linearize::{moqfa_to_gfa, qcfa_to_gfa};
use qfa_core::opcore::RealMatrix;
use qfa_core::scalar::parse_rational;
use qfa_core::signrank::{self, SignMatrix};
use qfa_core::stochasticize::{gfa_to_pfa, verify_conversion_exact, verify_sign_agreement};
use qfa_core::tolerance::{TAU_EQ, TAU_RANK};
use qfa_core::witnesses::{self, EtaMode, MoqfaWitnessBundle, QcfaWitnessBundle};
use qfa_core::{Rational, Scalar};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_py_any(py),
            (_, Some(u)) => u.into_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_py_any(py),
        },
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// A word given as a whitespace-separated string or a list of symbols.
#[derive(FromPyObject)]
enum WordArg {
    Text(String),
    Symbols(Vec<String>),
}

impl WordArg {
    fn word(&self) -> PyResult<Word> {
        match self {
            WordArg::Text(s) => s.parse().map_err(value_err),
            WordArg::Symbols(v) => Ok(Word::new(v.iter().cloned())),
        }
    }
}

/// A cutpoint given as a float or a `"p/q"` string.
#[derive(FromPyObject)]
enum CutpointArg {
    Float(f64),
    Text(String),
}

impl CutpointArg {
    fn rational(&self) -> PyResult<Rational> {
        match self {
            CutpointArg::Float(x) => Rational::from_f64(*x).ok_or_else(|| value_err("cutpoint must be finite")),
            CutpointArg::Text(s) => parse_rational(s).map_err(value_err),
        }
    }

    fn float(&self) -> PyResult<f64> {
        match self {
            CutpointArg::Float(x) => Ok(*x),
            CutpointArg::Text(_) => Ok(Scalar::to_f64(&self.rational()?)),
        }
    }
}

fn words_of(args: Vec<WordArg>) -> PyResult<Vec<Word>> {
    args.iter().map(WordArg::word).collect()
}

/// Any supported automaton: `gfa`, `pfa`, `moqfa` or `qcfa`.
#[pyclass(module = "qfa", name = "Automaton", frozen)]
pub struct PyAutomaton {
    inner: AnyAutomaton,
}

#[pymethods]
impl PyAutomaton {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: Value = serde_json::from_str(text).map_err(value_err)?;
        Ok(Self {
            inner: AnyAutomaton::from_json(&doc).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.inner.model()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.inner.as_automaton().alphabet().symbols().to_vec()
    }

    /// Number of states, or the Hilbert space dimension for MO-1QFA.
    #[getter]
    fn states(&self) -> usize {
        match &self.inner {
            AnyAutomaton::GfaFloat(g) => g.states(),
            AnyAutomaton::GfaExact(g) => g.states(),
            AnyAutomaton::PfaFloat(p) => p.states(),
            AnyAutomaton::PfaExact(p) => p.states(),
            AnyAutomaton::Moqfa(q) => q.dim(),
            AnyAutomaton::Qcfa(q) => q.classical_states(),
        }
    }

    /// Acceptance value `f(w)`.
    fn acceptance(&self, word: WordArg) -> PyResult<f64> {
        self.inner.as_automaton().acceptance(&word.word()?).map_err(value_err)
    }

    /// Exact acceptance value as a `"p/q"` string (exact GFA/PFA only).
    fn exact_acceptance(&self, word: WordArg) -> PyResult<String> {
        let w = word.word()?;
        let v = match &self.inner {
            AnyAutomaton::GfaExact(g) => g.evaluate(&w).map_err(value_err)?,
            AnyAutomaton::PfaExact(p) => p.evaluate(&w).map_err(value_err)?,
            _ => return Err(value_err("exact evaluation needs an exact gfa or pfa")),
        };
        Ok(v.to_json().as_str().unwrap_or_default().to_string())
    }

    /// Strict-cutpoint membership `f(w) > λ`.
    #[pyo3(signature = (word, cutpoint = CutpointArg::Float(0.5)))]
    fn accepts(&self, word: WordArg, cutpoint: CutpointArg) -> PyResult<bool> {
        let f = self.acceptance(word)?;
        Ok(member(f, &CutpointSpec::new(cutpoint.float()?)).accepted())
    }

    fn __repr__(&self) -> String {
        format!("Automaton(model={:?}, states={})", self.inner.model(), self.states())
    }
}

enum Bundle {
    Qcfa(QcfaWitnessBundle),
    Moqfa(MoqfaWitnessBundle),
}

/// A prepare-test witness automaton together with its construction data.
#[pyclass(module = "qfa", name = "Witness", frozen)]
pub struct PyWitness {
    bundle: Bundle,
}

#[pymethods]
impl PyWitness {
    #[getter]
    fn kind(&self) -> &'static str {
        match &self.bundle {
            Bundle::Qcfa(_) => "qcfa",
            Bundle::Moqfa(_) => "moqfa",
        }
    }

    #[getter]
    fn d(&self) -> usize {
        match &self.bundle {
            Bundle::Qcfa(b) => b.d,
            Bundle::Moqfa(b) => b.d,
        }
    }

    #[getter]
    fn t(&self) -> f64 {
        match &self.bundle {
            Bundle::Qcfa(b) => b.t,
            Bundle::Moqfa(b) => b.t,
        }
    }

    #[getter]
    fn etas(&self) -> Vec<Vec<i8>> {
        match &self.bundle {
            Bundle::Qcfa(b) => b.etas.clone(),
            Bundle::Moqfa(b) => b.etas.clone(),
        }
    }

    #[getter]
    fn automaton(&self) -> PyAutomaton {
        let inner = match &self.bundle {
            Bundle::Qcfa(b) => AnyAutomaton::Qcfa(b.automaton.clone()),
            Bundle::Moqfa(b) => AnyAutomaton::Moqfa(b.automaton.clone()),
        };
        PyAutomaton { inner }
    }

    fn meta(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let meta = match &self.bundle {
            Bundle::Qcfa(b) => b.meta(),
            Bundle::Moqfa(b) => b.meta(),
        };
        to_py(py, &meta)
    }

    /// Prefix and test words of the witness grid.
    fn grid(&self) -> (Vec<String>, Vec<String>) {
        let (grid, alphabet) = match &self.bundle {
            Bundle::Qcfa(b) => (b.grid(), b.automaton.alphabet()),
            Bundle::Moqfa(b) => (b.grid(), b.automaton.alphabet()),
        };
        let show = |ws: Vec<Word>| ws.iter().map(ToString::to_string).collect();
        (show(grid.prefix_words(alphabet)), show(grid.test_words(alphabet)))
    }

    /// Shattering check on the witness grid plus the value deviation
    /// (QCFA) or the expansion residuals (MO-1QFA).
    fn verify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report = py.detach(|| -> qfa_core::Result<Value> {
            Ok(match &self.bundle {
                Bundle::Qcfa(b) => {
                    let (rep, dev) = witnesses::verify_qcfa_witness(b)?;
                    json!({"passed": rep.passed(), "shattering": rep, "max_value_deviation": dev})
                }
                Bundle::Moqfa(b) => {
                    let grid = b.grid();
                    let rep = witnesses::verify_shattering(&b.automaton, &grid.prefixes, &grid.tests, 0.5, &grid.expected)?;
                    let exp = witnesses::verify_moqfa_expansion(b);
                    json!({"passed": rep.passed(), "shattering": rep, "expansion": exp})
                }
            })
        });
        to_py(py, &report.map_err(value_err)?)
    }

    fn to_json(&self) -> String {
        match &self.bundle {
            Bundle::Qcfa(b) => io::qcfa_witness_to_json(b),
            Bundle::Moqfa(b) => io::moqfa_witness_to_json(b),
        }
        .to_string()
    }
}

fn eta_mode(eta: &str, seed: u64) -> PyResult<EtaMode> {
    EtaMode::parse(eta, seed).map_err(value_err)
}

/// QCFA witness with `d = cq² − 1` prefixes.
#[pyfunction]
#[pyo3(signature = (c, q, eta = "full", seed = 0))]
fn qcfa_witness(py: Python<'_>, c: usize, q: usize, eta: &str, seed: u64) -> PyResult<PyWitness> {
    let mode = eta_mode(eta, seed)?;
    let b = py.detach(|| witnesses::build_qcfa_witness(c, q, mode)).map_err(value_err)?;
    Ok(PyWitness { bundle: Bundle::Qcfa(b) })
}

/// MO-1QFA witness with `d = 2⌊n/2⌋⌈n/2⌉` prefixes.
#[pyfunction]
#[pyo3(signature = (n, eta = "full", seed = 0))]
fn moqfa_witness(py: Python<'_>, n: usize, eta: &str, seed: u64) -> PyResult<PyWitness> {
    let mode = eta_mode(eta, seed)?;
    let b = py.detach(|| witnesses::build_moqfa_witness(n, mode)).map_err(value_err)?;
    Ok(PyWitness { bundle: Bundle::Moqfa(b) })
}

/// Equivalent generalized automaton of a QCFA or MO-1QFA.
#[pyfunction]
fn linearize(automaton: &PyAutomaton) -> PyResult<PyAutomaton> {
    let g = match &automaton.inner {
        AnyAutomaton::Qcfa(q) => qcfa_to_gfa(q),
        AnyAutomaton::Moqfa(q) => moqfa_to_gfa(q),
        other => return Err(value_err(format!("cannot linearize a {}", other.model()))),
    }
    .map_err(value_err)?;
    Ok(PyAutomaton {
        inner: AnyAutomaton::GfaFloat(g),
    })
}

/// PFA with cutpoint 1/2 for a GFA with cutpoint λ, plus the conversion
/// constants. `exact=True` converts in rational arithmetic.
#[pyfunction]
#[pyo3(signature = (gfa, cutpoint, exact = false))]
fn stochasticize(py: Python<'_>, gfa: &PyAutomaton, cutpoint: CutpointArg, exact: bool) -> PyResult<(PyAutomaton, Py<PyAny>)> {
    let (inner, report) = match (&gfa.inner, exact) {
        (AnyAutomaton::GfaExact(g), true) => {
            let (p, r) = gfa_to_pfa(g, &cutpoint.rational()?).map_err(value_err)?;
            (AnyAutomaton::PfaExact(p), r.to_json())
        }
        (AnyAutomaton::GfaFloat(g), false) => {
            let (p, r) = gfa_to_pfa(g, &cutpoint.float()?).map_err(value_err)?;
            (AnyAutomaton::PfaFloat(p), r.to_json())
        }
        (AnyAutomaton::GfaExact(g), false) => {
            let (p, r) = gfa_to_pfa(&g.to_float(), &cutpoint.float()?).map_err(value_err)?;
            (AnyAutomaton::PfaFloat(p), r.to_json())
        }
        (AnyAutomaton::GfaFloat(_), true) => return Err(value_err("exact conversion needs an exact gfa document")),
        (other, _) => return Err(value_err(format!("cannot stochasticize a {}", other.model()))),
    };
    Ok((PyAutomaton { inner }, to_py(py, &report)?))
}

/// Exact sign agreement and closed-form check of an exact conversion on
/// every word up to `max_len`.
#[pyfunction]
fn verify_exact_conversion(py: Python<'_>, gfa: &PyAutomaton, cutpoint: CutpointArg, max_len: usize) -> PyResult<Py<PyAny>> {
    let AnyAutomaton::GfaExact(g) = &gfa.inner else {
        return Err(value_err("exact verification needs an exact gfa"));
    };
    let lambda = cutpoint.rational()?;
    let (p, r) = gfa_to_pfa(g, &lambda).map_err(value_err)?;
    let check = py.detach(|| verify_conversion_exact(g, &lambda, &p, &r, max_len));
    to_py(
        py,
        &json!({
            "holds": check.holds(),
            "words_checked": check.words_checked,
            "sign_agreements": check.sign_agreements,
            "closed_form_matches": check.closed_form_matches,
        }),
    )
}

/// Float sign agreement of `reference` at `λ` and `candidate` at `μ` on all
/// words up to `max_len`.
#[pyfunction]
#[pyo3(signature = (reference, cutpoint, candidate, candidate_cutpoint = CutpointArg::Float(0.5), max_len = 4))]
fn sign_agreement(
    py: Python<'_>,
    reference: &PyAutomaton,
    cutpoint: CutpointArg,
    candidate: &PyAutomaton,
    candidate_cutpoint: CutpointArg,
    max_len: usize,
) -> PyResult<Py<PyAny>> {
    let (lambda, mu) = (cutpoint.float()?, candidate_cutpoint.float()?);
    let rep = py
        .detach(|| verify_sign_agreement(reference.inner.as_automaton(), lambda, candidate.inner.as_automaton(), mu, max_len))
        .map_err(value_err)?;
    to_py(py, &rep.to_json())
}

/// All words up to `max_len` over the automaton's alphabet.
#[pyfunction]
fn words(automaton: &PyAutomaton, max_len: usize) -> Vec<String> {
    let alphabet = automaton.inner.as_automaton().alphabet();
    let symbols: Vec<usize> = (0..alphabet.len()).collect();
    enumerate_words(&symbols, max_len)
        .iter()
        .map(|w| alphabet.word_from_indices(w).to_string())
        .collect()
}

/// Strict-cutpoint signs of `f(xy)` for prefixes `x` (rows) and suffixes `y`.
#[pyfunction]
#[pyo3(signature = (automaton, prefixes, suffixes, cutpoint = CutpointArg::Float(0.5)))]
fn sign_matrix(
    py: Python<'_>,
    automaton: &PyAutomaton,
    prefixes: Vec<WordArg>,
    suffixes: Vec<WordArg>,
    cutpoint: CutpointArg,
) -> PyResult<Vec<Vec<i8>>> {
    let (xs, ys, lambda) = (words_of(prefixes)?, words_of(suffixes)?, cutpoint.float()?);
    let s = py
        .detach(|| signrank::sign_matrix(automaton.inner.as_automaton(), lambda, &xs, &ys))
        .map_err(value_err)?;
    Ok(signs_of(&s))
}

/// Shifted value matrix whose signs match the sign matrix and whose rank
/// is at most the state count (PFA) or `n²` (MO-1QFA).
#[pyfunction]
#[pyo3(signature = (automaton, prefixes, suffixes, cutpoint = CutpointArg::Float(0.5)))]
fn realization(
    py: Python<'_>,
    automaton: &PyAutomaton,
    prefixes: Vec<WordArg>,
    suffixes: Vec<WordArg>,
    cutpoint: CutpointArg,
) -> PyResult<Py<PyAny>> {
    let (xs, ys, lambda) = (words_of(prefixes)?, words_of(suffixes)?, cutpoint.float()?);
    let r = match &automaton.inner {
        AnyAutomaton::Moqfa(q) => signrank::quantum_realization(q, lambda, &xs, &ys),
        AnyAutomaton::PfaFloat(p) => signrank::pfa_realization(p, lambda, &xs, &ys),
        AnyAutomaton::PfaExact(p) => signrank::pfa_realization(p, lambda, &xs, &ys),
        other => return Err(value_err(format!("no realization for a {}", other.model()))),
    }
    .map_err(value_err)?;
    let mut doc = r.to_json();
    doc["rank"] = json!(r.rank().rank);
    to_py(py, &doc)
}

fn signs_of(s: &SignMatrix) -> Vec<Vec<i8>> {
    (0..s.rows()).map(|i| s.row(i).to_vec()).collect()
}

fn sign_input(signs: Vec<Vec<i8>>) -> PyResult<SignMatrix> {
    let rows = signs.len();
    let cols = signs.first().map_or(0, Vec::len);
    let labels = |n: usize| (0..n).map(|i| i.to_string()).collect();
    SignMatrix::new(labels(rows), labels(cols), signs).map_err(value_err)
}

fn real_input(rows: Vec<Vec<f64>>) -> PyResult<RealMatrix> {
    RealMatrix::from_rows(rows).map_err(value_err)
}

/// The complete shattering matrix `C_d` (`d × 2^d`).
#[pyfunction]
fn complete_shattering(d: usize) -> PyResult<Vec<Vec<i8>>> {
    Ok(signs_of(&signrank::complete_shattering(d).map_err(value_err)?))
}

#[pyfunction]
fn sylvester_hadamard(l: usize) -> PyResult<Vec<Vec<i8>>> {
    Ok(signs_of(&signrank::sylvester_hadamard(l).map_err(value_err)?))
}

#[pyfunction]
#[pyo3(signature = (matrix, rel_tol = TAU_RANK))]
fn numerical_rank(matrix: Vec<Vec<f64>>, rel_tol: f64) -> PyResult<usize> {
    Ok(signrank::numerical_rank(&real_input(matrix)?, rel_tol))
}

#[pyfunction]
fn spectral_norm(signs: Vec<Vec<i8>>) -> PyResult<f64> {
    Ok(signrank::spectral_norm(&sign_input(signs)?))
}

/// `L/‖S‖₂` and its cap `√L` for a square sign matrix.
#[pyfunction]
fn forster_bound(py: Python<'_>, signs: Vec<Vec<i8>>) -> PyResult<Py<PyAny>> {
    let rep = signrank::forster_bound(&sign_input(signs)?).map_err(value_err)?;
    to_py(py, &json!(rep))
}

/// Orthant and rank check of a `d × 2^d` realization of `C_d`.
#[pyfunction]
fn orthant_certificate(py: Python<'_>, matrix: Vec<Vec<f64>>) -> PyResult<Py<PyAny>> {
    let cert = signrank::orthant_certificate(&real_input(matrix)?).map_err(value_err)?;
    to_py(py, &json!(cert))
}

/// Numerical rank of the finite-difference Jacobian of the unitary orbit
/// map at the rank-`⌊n/2⌋` coordinate projector.
#[pyfunction]
#[pyo3(signature = (n, rel_tol = 1e-4))]
fn orbit_jacobian_rank(n: usize, rel_tol: f64) -> PyResult<usize> {
    let j = witnesses::orbit_jacobian(n).map_err(value_err)?;
    Ok(signrank::numerical_rank(&j, rel_tol))
}

#[pymodule]
fn qfa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyWitness>()?;
    m.add("TAU_EQ", TAU_EQ)?;
    m.add("TAU_RANK", TAU_RANK)?;
    m.add_function(wrap_pyfunction!(qcfa_witness, m)?)?;
    m.add_function(wrap_pyfunction!(moqfa_witness, m)?)?;
    m.add_function(wrap_pyfunction!(linearize, m)?)?;
    m.add_function(wrap_pyfunction!(stochasticize, m)?)?;
    m.add_function(wrap_pyfunction!(verify_exact_conversion, m)?)?;
    m.add_function(wrap_pyfunction!(sign_agreement, m)?)?;
    m.add_function(wrap_pyfunction!(words, m)?)?;
    m.add_function(wrap_pyfunction!(sign_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(realization, m)?)?;
    m.add_function(wrap_pyfunction!(complete_shattering, m)?)?;
    m.add_function(wrap_pyfunction!(sylvester_hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(numerical_rank, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_norm, m)?)?;
    m.add_function(wrap_pyfunction!(forster_bound, m)?)?;
    m.add_function(wrap_pyfunction!(orthant_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_jacobian_rank, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_values_become_python_objects() {
        Python::initialize();
        Python::attach(|py| {
            let v = json!({"a": [1, -2, 0.5, null, true], "b": "x"});
            let obj = to_py(py, &v).unwrap();
            let dict = obj.bind(py).cast::<PyDict>().unwrap();
            let a = dict.get_item("a").unwrap().unwrap();
            assert_eq!(a.len().unwrap(), 5);
            assert_eq!(a.get_item(1).unwrap().extract::<i64>().unwrap(), -2);
            assert_eq!(a.get_item(2).unwrap().extract::<f64>().unwrap(), 0.5);
            assert!(a.get_item(3).unwrap().is_none());
            assert_eq!(dict.get_item("b").unwrap().unwrap().extract::<String>().unwrap(), "x");
        });
    }

    #[test]
    fn argument_forms() {
        assert_eq!(WordArg::Text("a b".into()).word().unwrap(), Word::new(["a", "b"]));
        assert_eq!(WordArg::Symbols(vec!["p:1".into()]).word().unwrap(), Word::single("p:1"));
        assert_eq!(CutpointArg::Text("1/4".into()).float().unwrap(), 0.25);
        assert_eq!(CutpointArg::Float(0.5).rational().unwrap(), Rational::from_ratio(1, 2));
        assert!(CutpointArg::Float(f64::NAN).rational().is_err());
        assert!(sign_input(vec![vec![1, -1], vec![1]]).is_err());
    }

    #[test]
    fn witness_wrapper_round_trips() {
        Python::initialize();
        Python::attach(|py| {
            let w = moqfa_witness(py, 2, "full", 0).unwrap();
            assert_eq!((w.kind(), w.d()), ("moqfa", 2));
            let a = w.automaton();
            let restored = PyAutomaton::from_json(&a.to_json()).unwrap();
            let word = WordArg::Text("p:1 tau:+-".into());
            assert!(restored.accepts(word, CutpointArg::Float(0.5)).unwrap());
        });
    }
}
