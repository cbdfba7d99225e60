//! JSON documents for automata and witness bundles.
//!
//! Every document carries `"format": 1`, a `"model"` tag and the alphabet.
//! Matrices are arrays of rows, complex entries are `[re, im]` pairs and
//! exact rationals are `"p/q"` strings. Per-symbol data is listed in alphabet
//! order; QCFA data is indexed `[state][symbol]`.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::automata::{Alphabet, Automaton, Gfa, Moqfa, Pfa, Qcfa};
use crate::error::{Error, Result};
use crate::opcore::{ComplexMatrix, DensityOperator, EffectOperator, KrausChannel, Matrix, Projector, C64};
use crate::scalar::{Rational, Scalar};
use crate::witnesses::{MoqfaWitnessBundle, QcfaWitnessBundle};

pub const FORMAT_VERSION: u64 = 1;

/// Any automaton document, with the scalar mode resolved.
#[derive(Clone, Debug)]
pub enum AnyAutomaton {
    GfaFloat(Gfa<f64>),
    GfaExact(Gfa<Rational>),
    PfaFloat(Pfa<f64>),
    PfaExact(Pfa<Rational>),
    Moqfa(Moqfa),
    Qcfa(Qcfa),
}

impl AnyAutomaton {
    pub fn model(&self) -> &'static str {
        match self {
            AnyAutomaton::GfaFloat(_) | AnyAutomaton::GfaExact(_) => "gfa",
            AnyAutomaton::PfaFloat(_) | AnyAutomaton::PfaExact(_) => "pfa",
            AnyAutomaton::Moqfa(_) => "moqfa",
            AnyAutomaton::Qcfa(_) => "qcfa",
        }
    }

    pub fn as_automaton(&self) -> &dyn Automaton {
        match self {
            AnyAutomaton::GfaFloat(a) => a,
            AnyAutomaton::GfaExact(a) => a,
            AnyAutomaton::PfaFloat(a) => a,
            AnyAutomaton::PfaExact(a) => a,
            AnyAutomaton::Moqfa(a) => a,
            AnyAutomaton::Qcfa(a) => a,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyAutomaton::GfaFloat(a) => gfa_to_json(a),
            AnyAutomaton::GfaExact(a) => gfa_to_json(a),
            AnyAutomaton::PfaFloat(a) => pfa_to_json(a),
            AnyAutomaton::PfaExact(a) => pfa_to_json(a),
            AnyAutomaton::Moqfa(a) => moqfa_to_json(a),
            AnyAutomaton::Qcfa(a) => qcfa_to_json(a),
        }
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let format = doc.get("format").and_then(Value::as_u64);
        if format != Some(FORMAT_VERSION) {
            return Err(Error::Format(format!("unsupported format version {format:?}")));
        }
        let exact = match doc.get("scalar_mode").and_then(Value::as_str) {
            None | Some("float") => false,
            Some("exact") => true,
            Some(other) => return Err(Error::Format(format!("unknown scalar_mode {other:?}"))),
        };
        match (str_field(doc, "model")?, exact) {
            ("gfa", false) => gfa_from_json(doc).map(AnyAutomaton::GfaFloat),
            ("gfa", true) => gfa_from_json(doc).map(AnyAutomaton::GfaExact),
            ("pfa", false) => pfa_from_json(doc).map(AnyAutomaton::PfaFloat),
            ("pfa", true) => pfa_from_json(doc).map(AnyAutomaton::PfaExact),
            ("moqfa", _) => moqfa_from_json(doc).map(AnyAutomaton::Moqfa),
            ("qcfa", _) => qcfa_from_json(doc).map(AnyAutomaton::Qcfa),
            (other, _) => Err(Error::Format(format!("unknown model {other:?}"))),
        }
    }
}

fn field<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key).ok_or_else(|| Error::Format(format!("missing field {key:?}")))
}

fn str_field<'a>(doc: &'a Value, key: &str) -> Result<&'a str> {
    field(doc, key)?
        .as_str()
        .ok_or_else(|| Error::Format(format!("field {key:?} must be a string")))
}

fn usize_field(doc: &Value, key: &str) -> Result<usize> {
    field(doc, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Format(format!("field {key:?} must be a non-negative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Format(format!("{what} must be an array")))
}

fn header(model: &str, alphabet: &Alphabet) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("format".into(), json!(FORMAT_VERSION));
    m.insert("model".into(), json!(model));
    m.insert("alphabet".into(), json!(alphabet.symbols()));
    m
}

fn alphabet_from(doc: &Value) -> Result<Alphabet> {
    let symbols = array(field(doc, "alphabet")?, "alphabet")?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Format("alphabet symbols must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Alphabet::new(symbols)
}

fn scalar_vec_to_json<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn scalar_vec_from_json<T: Scalar>(v: &Value, what: &str) -> Result<Vec<T>> {
    array(v, what)?.iter().map(T::from_json).collect()
}

fn scalar_matrix_to_json<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|i| scalar_vec_to_json(m.row(i))).collect())
}

fn scalar_matrix_from_json<T: Scalar>(v: &Value, what: &str) -> Result<Matrix<T>> {
    let rows = array(v, what)?
        .iter()
        .map(|r| scalar_vec_from_json(r, what))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

fn complex_to_json(z: &C64) -> Value {
    json!([z.re, z.im])
}

fn complex_from_json(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| C64::new(x, 0.0)),
        Value::Array(p) if p.len() == 2 => p[0].as_f64().zip(p[1].as_f64()).map(|(re, im)| C64::new(re, im)),
        _ => None,
    }
    .ok_or_else(|| Error::Format(format!("bad complex entry {v}")))
}

fn complex_vec_to_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(complex_to_json).collect())
}

fn complex_vec_from_json(v: &Value, what: &str) -> Result<Vec<C64>> {
    array(v, what)?.iter().map(complex_from_json).collect()
}

pub fn complex_matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| complex_vec_to_json(m.row(i))).collect())
}

pub fn complex_matrix_from_json(v: &Value, what: &str) -> Result<ComplexMatrix> {
    let rows = array(v, what)?
        .iter()
        .map(|r| complex_vec_from_json(r, what))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::from_rows(rows)
}

pub fn gfa_to_json<T: Scalar>(g: &Gfa<T>) -> Value {
    let mut m = header("gfa", g.alphabet());
    m.insert("scalar_mode".into(), json!(T::MODE));
    m.insert("states".into(), json!(g.states()));
    m.insert("initial".into(), scalar_vec_to_json(g.initial()));
    m.insert(
        "transitions".into(),
        Value::Array(g.transitions().iter().map(scalar_matrix_to_json).collect()),
    );
    m.insert("final".into(), scalar_vec_to_json(g.final_vector()));
    Value::Object(m)
}

pub fn gfa_from_json<T: Scalar>(doc: &Value) -> Result<Gfa<T>> {
    let transitions = array(field(doc, "transitions")?, "transitions")?
        .iter()
        .map(|m| scalar_matrix_from_json(m, "transition matrix"))
        .collect::<Result<Vec<_>>>()?;
    Gfa::new(
        alphabet_from(doc)?,
        scalar_vec_from_json(field(doc, "initial")?, "initial")?,
        transitions,
        scalar_vec_from_json(field(doc, "final")?, "final")?,
    )
}

pub fn pfa_to_json<T: Scalar>(p: &Pfa<T>) -> Value {
    let mut m = header("pfa", p.alphabet());
    m.insert("scalar_mode".into(), json!(T::MODE));
    m.insert("states".into(), json!(p.states()));
    m.insert("initial".into(), scalar_vec_to_json(p.initial()));
    m.insert(
        "transitions".into(),
        Value::Array(p.transitions().iter().map(scalar_matrix_to_json).collect()),
    );
    m.insert("endmarker".into(), scalar_matrix_to_json(p.endmarker()));
    m.insert("accepting".into(), json!(p.accepting()));
    Value::Object(m)
}

pub fn pfa_from_json<T: Scalar>(doc: &Value) -> Result<Pfa<T>> {
    let transitions = array(field(doc, "transitions")?, "transitions")?
        .iter()
        .map(|m| scalar_matrix_from_json(m, "transition matrix"))
        .collect::<Result<Vec<_>>>()?;
    let accepting = array(field(doc, "accepting")?, "accepting")?
        .iter()
        .map(|s| s.as_u64().map(|x| x as usize).ok_or_else(|| Error::Format("accepting states must be integers".into())))
        .collect::<Result<Vec<_>>>()?;
    Pfa::new(
        alphabet_from(doc)?,
        scalar_vec_from_json(field(doc, "initial")?, "initial")?,
        transitions,
        scalar_matrix_from_json(field(doc, "endmarker")?, "endmarker")?,
        accepting,
    )
}

pub fn moqfa_to_json(q: &Moqfa) -> Value {
    let mut m = header("moqfa", q.alphabet());
    m.insert("dim".into(), json!(q.dim()));
    m.insert("initial".into(), complex_vec_to_json(q.initial()));
    m.insert(
        "unitaries".into(),
        Value::Array(q.unitaries().iter().map(complex_matrix_to_json).collect()),
    );
    m.insert("accept".into(), complex_matrix_to_json(q.accept().matrix()));
    Value::Object(m)
}

pub fn moqfa_from_json(doc: &Value) -> Result<Moqfa> {
    let unitaries = array(field(doc, "unitaries")?, "unitaries")?
        .iter()
        .map(|u| complex_matrix_from_json(u, "unitary"))
        .collect::<Result<Vec<_>>>()?;
    Moqfa::new(
        alphabet_from(doc)?,
        complex_vec_from_json(field(doc, "initial")?, "initial")?,
        unitaries,
        Projector::new(complex_matrix_from_json(field(doc, "accept")?, "accept")?)?,
    )
}

pub fn qcfa_to_json(a: &Qcfa) -> Value {
    let (c, nsym) = (a.classical_states(), a.alphabet().len());
    let mut m = header("qcfa", a.alphabet());
    m.insert("classical_states".into(), json!(c));
    m.insert("quantum_dim".into(), json!(a.quantum_dim()));
    m.insert("initial_classical".into(), json!(a.initial_classical()));
    m.insert("initial_quantum".into(), complex_matrix_to_json(a.initial_quantum().matrix()));
    let delta: Vec<Vec<usize>> = (0..c).map(|s| (0..nsym).map(|x| a.delta(s, x)).collect()).collect();
    m.insert("delta".into(), json!(delta));
    let channels: Vec<Value> = (0..c)
        .map(|s| {
            Value::Array(
                (0..nsym)
                    .map(|x| Value::Array(a.channel(s, x).kraus().iter().map(complex_matrix_to_json).collect()))
                    .collect(),
            )
        })
        .collect();
    m.insert("channels".into(), Value::Array(channels));
    m.insert("accept".into(), complex_matrix_to_json(a.accept().matrix()));
    Value::Object(m)
}

pub fn qcfa_from_json(doc: &Value) -> Result<Qcfa> {
    let c = usize_field(doc, "classical_states")?;
    let delta = array(field(doc, "delta")?, "delta")?
        .iter()
        .map(|row| {
            array(row, "delta row")?
                .iter()
                .map(|x| x.as_u64().map(|v| v as usize).ok_or_else(|| Error::Format("delta entries must be integers".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let channels = array(field(doc, "channels")?, "channels")?
        .iter()
        .map(|row| {
            array(row, "channel row")?
                .iter()
                .map(|ks| {
                    let kraus = array(ks, "Kraus list")?
                        .iter()
                        .map(|k| complex_matrix_from_json(k, "Kraus operator"))
                        .collect::<Result<Vec<_>>>()?;
                    KrausChannel::new(kraus).map(Arc::new)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Qcfa::new(
        alphabet_from(doc)?,
        c,
        usize_field(doc, "initial_classical")?,
        DensityOperator::new(complex_matrix_from_json(field(doc, "initial_quantum")?, "initial_quantum")?)?,
        delta,
        channels,
        EffectOperator::new(complex_matrix_from_json(field(doc, "accept")?, "accept")?)?,
    )
}

fn with_meta(mut doc: Value, meta: Value) -> Value {
    if let Value::Object(m) = &mut doc {
        m.insert("witness_meta".into(), meta);
    }
    doc
}

pub fn qcfa_witness_to_json(bundle: &QcfaWitnessBundle) -> Value {
    with_meta(qcfa_to_json(&bundle.automaton), bundle.meta())
}

pub fn moqfa_witness_to_json(bundle: &MoqfaWitnessBundle) -> Value {
    with_meta(moqfa_to_json(&bundle.automaton), bundle.meta())
}
