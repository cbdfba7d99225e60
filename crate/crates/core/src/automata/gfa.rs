use crate::error::{Error, Result};
use crate::opcore::Matrix;
use crate::scalar::Scalar;

use super::word::{Alphabet, Word};
use super::Automaton;

/// Generalized finite automaton: `f(w) = u · A_{σ1} ⋯ A_{σm} · v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gfa<T> {
    alphabet: Alphabet,
    initial: Vec<T>,
    transitions: Vec<Matrix<T>>,
    final_vector: Vec<T>,
}

impl<T: Scalar> Gfa<T> {
    /// `transitions[i]` belongs to `alphabet.symbol(i)`.
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<T>,
        transitions: Vec<Matrix<T>>,
        final_vector: Vec<T>,
    ) -> Result<Self> {
        let k = initial.len();
        if k == 0 {
            return Err(Error::InvalidParameter("a GFA needs at least one state".into()));
        }
        if final_vector.len() != k {
            return Err(Error::dims(format!("final vector of length {k}"), final_vector.len()));
        }
        if transitions.len() != alphabet.len() {
            return Err(Error::dims(
                format!("{} transition matrices", alphabet.len()),
                transitions.len(),
            ));
        }
        for m in &transitions {
            m.require_shape(k, k)?;
        }
        Ok(Self {
            alphabet,
            initial,
            transitions,
            final_vector,
        })
    }

    pub fn states(&self) -> usize {
        self.initial.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &[T] {
        &self.initial
    }

    pub fn transitions(&self) -> &[Matrix<T>] {
        &self.transitions
    }

    pub fn transition(&self, symbol: usize) -> &Matrix<T> {
        &self.transitions[symbol]
    }

    pub fn final_vector(&self) -> &[T] {
        &self.final_vector
    }

    /// Advance a row state vector through the given symbols.
    pub fn run(&self, mut state: Vec<T>, symbols: &[usize]) -> Vec<T> {
        for &s in symbols {
            state = self.transitions[s].left_mul_vec(&state);
        }
        state
    }

    /// `state · v`.
    pub fn readout(&self, state: &[T]) -> T {
        state
            .iter()
            .zip(&self.final_vector)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn evaluate_indices(&self, symbols: &[usize]) -> T {
        self.readout(&self.run(self.initial.clone(), symbols))
    }

    pub fn evaluate(&self, word: &Word) -> Result<T> {
        Ok(self.evaluate_indices(&self.alphabet.resolve(word)?))
    }

    /// Converts an exact automaton to floating point.
    pub fn to_float(&self) -> Gfa<f64> {
        Gfa {
            alphabet: self.alphabet.clone(),
            initial: self.initial.iter().map(T::to_f64).collect(),
            transitions: self.transitions.iter().map(|m| m.map(T::to_f64)).collect(),
            final_vector: self.final_vector.iter().map(T::to_f64).collect(),
        }
    }
}

/// `f(w) = u · A_w · v` over the given alphabet.
pub fn evaluate_gfa<T: Scalar>(gfa: &Gfa<T>, word: &Word) -> Result<T> {
    gfa.evaluate(word)
}

impl<T: Scalar> Automaton for Gfa<T> {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn acceptance_indices(&self, symbols: &[usize]) -> f64 {
        self.evaluate_indices(symbols).to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::RealMatrix;

    fn swap_gfa() -> Gfa<f64> {
        let swap = RealMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        Gfa::new(Alphabet::new(["a"]).unwrap(), vec![1.0, 0.0], vec![swap], vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn swap_example() {
        let g = swap_gfa();
        assert_eq!(g.evaluate(&Word::empty()).unwrap(), 1.0);
        assert_eq!(g.evaluate(&"a".parse().unwrap()).unwrap(), 0.0);
        assert_eq!(g.evaluate(&"a a".parse().unwrap()).unwrap(), 1.0);
        assert!(matches!(g.evaluate(&"b".parse().unwrap()), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn doubling() {
        let g = Gfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec![1.0],
            vec![RealMatrix::from_rows(vec![vec![2.0]]).unwrap()],
            vec![1.0],
        )
        .unwrap();
        for n in 0..10 {
            assert_eq!(g.evaluate_indices(&vec![0; n]), 2f64.powi(n as i32));
        }
    }

    #[test]
    fn run_is_a_monoid_action() {
        let g = swap_gfa();
        let s = g.run(g.initial().to_vec(), &[0, 0, 0]);
        let t = g.run(g.run(g.initial().to_vec(), &[0]), &[0, 0]);
        assert_eq!(s, t);
    }

    #[test]
    fn validation() {
        let a = Alphabet::new(["a"]).unwrap();
        assert!(Gfa::<f64>::new(a.clone(), vec![], vec![RealMatrix::zeros(0, 0)], vec![]).is_err());
        assert!(Gfa::new(a.clone(), vec![1.0], vec![RealMatrix::zeros(2, 2)], vec![1.0]).is_err());
        assert!(Gfa::new(a.clone(), vec![1.0], vec![], vec![1.0]).is_err());
        assert!(Gfa::new(a, vec![1.0], vec![RealMatrix::zeros(1, 1)], vec![1.0, 2.0]).is_err());
    }
}
