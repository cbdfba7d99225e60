use std::sync::Arc;

use crate::error::{Error, Result};
use crate::opcore::{ComplexMatrix, DensityOperator, EffectOperator, KrausChannel};

use super::word::{Alphabet, Word};
use super::Automaton;

/// One-way automaton with a deterministic classical control and a quantum
/// register updated by Kraus channels chosen per (state, symbol).
#[derive(Clone, Debug)]
pub struct Qcfa {
    alphabet: Alphabet,
    classical_states: usize,
    initial_classical: usize,
    initial_quantum: DensityOperator,
    /// Indexed `[s * |Σ| + σ]`.
    delta: Vec<usize>,
    channels: Vec<Arc<KrausChannel>>,
    accept: EffectOperator,
}

impl Qcfa {
    /// `delta[s][σ]` and `channels[s][σ]` with σ in alphabet order.
    pub fn new(
        alphabet: Alphabet,
        classical_states: usize,
        initial_classical: usize,
        initial_quantum: DensityOperator,
        delta: Vec<Vec<usize>>,
        channels: Vec<Vec<Arc<KrausChannel>>>,
        accept: EffectOperator,
    ) -> Result<Self> {
        let c = classical_states;
        let nsym = alphabet.len();
        let q = initial_quantum.dim();
        if c == 0 {
            return Err(Error::InvalidParameter("no classical states".into()));
        }
        if initial_classical >= c {
            return Err(Error::InvalidParameter(format!(
                "initial classical state {initial_classical} out of range"
            )));
        }
        if accept.dim() != q {
            return Err(Error::dims(q, accept.dim()));
        }
        if delta.len() != c || channels.len() != c {
            return Err(Error::dims(format!("{c} rows of transitions"), delta.len().min(channels.len())));
        }
        let mut flat_delta = Vec::with_capacity(c * nsym);
        let mut flat_channels = Vec::with_capacity(c * nsym);
        for (row_d, row_c) in delta.into_iter().zip(channels) {
            if row_d.len() != nsym || row_c.len() != nsym {
                return Err(Error::dims(nsym, row_d.len().min(row_c.len())));
            }
            for t in &row_d {
                if *t >= c {
                    return Err(Error::InvalidParameter(format!("transition to state {t} out of range")));
                }
            }
            for ch in &row_c {
                if ch.dim_in() != q || ch.dim_out() != q {
                    return Err(Error::dims(q, ch.dim_in().max(ch.dim_out())));
                }
            }
            flat_delta.extend(row_d);
            flat_channels.extend(row_c);
        }
        Ok(Self {
            alphabet,
            classical_states: c,
            initial_classical,
            initial_quantum,
            delta: flat_delta,
            channels: flat_channels,
            accept,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn classical_states(&self) -> usize {
        self.classical_states
    }

    pub fn quantum_dim(&self) -> usize {
        self.initial_quantum.dim()
    }

    pub fn initial_classical(&self) -> usize {
        self.initial_classical
    }

    pub fn initial_quantum(&self) -> &DensityOperator {
        &self.initial_quantum
    }

    pub fn accept(&self) -> &EffectOperator {
        &self.accept
    }

    pub fn delta(&self, state: usize, symbol: usize) -> usize {
        self.delta[state * self.alphabet.len() + symbol]
    }

    pub fn channel(&self, state: usize, symbol: usize) -> &KrausChannel {
        &self.channels[state * self.alphabet.len() + symbol]
    }

    /// Threads a classical-quantum configuration through `symbols`.
    pub fn run_config(&self, mut state: usize, mut rho: ComplexMatrix, symbols: &[usize]) -> (usize, ComplexMatrix) {
        for &s in symbols {
            rho = self.channel(state, s).apply_raw(&rho).hermitian_part();
            state = self.delta(state, s);
        }
        (state, rho)
    }

    pub fn evaluate_indices(&self, symbols: &[usize]) -> f64 {
        let (_, rho) = self.run_config(self.initial_classical, self.initial_quantum.matrix().clone(), symbols);
        self.accept.probability(&rho).clamp(0.0, 1.0)
    }

    pub fn evaluate(&self, word: &Word) -> Result<f64> {
        Ok(self.evaluate_indices(&self.alphabet.resolve(word)?))
    }
}

pub fn evaluate_qcfa(a: &Qcfa, word: &Word) -> Result<f64> {
    a.evaluate(word)
}

impl Automaton for Qcfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn acceptance_indices(&self, symbols: &[usize]) -> f64 {
        self.evaluate_indices(symbols)
    }
}
