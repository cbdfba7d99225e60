use crate::error::{Error, Result};
use crate::opcore::Matrix;
use crate::scalar::Scalar;

use super::word::{Alphabet, Word};
use super::Automaton;

const FLOAT_STOCHASTIC_TOL: f64 = 1e-12;

/// Probabilistic automaton with end-marker:
/// `f(w) = π P_{σ1} ⋯ P_{σm} P_# 1_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pfa<T> {
    alphabet: Alphabet,
    initial: Vec<T>,
    transitions: Vec<Matrix<T>>,
    endmarker: Matrix<T>,
    accepting: Vec<usize>,
}

fn check_distribution<T: Scalar>(v: &[T], what: &str) -> Result<()> {
    let tol = if T::EXACT { 0.0 } else { FLOAT_STOCHASTIC_TOL };
    let mut sum = T::zero();
    for x in v {
        if x.to_f64() < -tol || (T::EXACT && x.is_negative()) {
            return Err(Error::NotStochastic(format!("{what} has a negative entry {x:?}")));
        }
        sum = sum + x.clone();
    }
    let ok = if T::EXACT {
        sum.is_one()
    } else {
        (sum.to_f64() - 1.0).abs() <= tol
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotStochastic(format!("{what} sums to {sum:?}")))
    }
}

fn check_stochastic<T: Scalar>(m: &Matrix<T>, what: &str) -> Result<()> {
    for i in 0..m.rows() {
        check_distribution(m.row(i), &format!("row {i} of {what}"))?;
    }
    Ok(())
}

impl<T: Scalar> Pfa<T> {
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<T>,
        transitions: Vec<Matrix<T>>,
        endmarker: Matrix<T>,
        mut accepting: Vec<usize>,
    ) -> Result<Self> {
        let m = initial.len();
        if m == 0 {
            return Err(Error::InvalidParameter("a PFA needs at least one state".into()));
        }
        if transitions.len() != alphabet.len() {
            return Err(Error::dims(
                format!("{} transition matrices", alphabet.len()),
                transitions.len(),
            ));
        }
        check_distribution(&initial, "initial distribution")?;
        for (i, p) in transitions.iter().enumerate() {
            p.require_shape(m, m)?;
            check_stochastic(p, &format!("transition {:?}", alphabet.symbol(i)))?;
        }
        endmarker.require_shape(m, m)?;
        check_stochastic(&endmarker, "end-marker")?;
        accepting.sort_unstable();
        accepting.dedup();
        if let Some(&bad) = accepting.iter().find(|&&s| s >= m) {
            return Err(Error::InvalidParameter(format!("accepting state {bad} out of range")));
        }
        Ok(Self {
            alphabet,
            initial,
            transitions,
            endmarker,
            accepting,
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

    pub fn endmarker(&self) -> &Matrix<T> {
        &self.endmarker
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    /// Column indicator `1_F`.
    pub fn accepting_indicator(&self) -> Vec<T> {
        let mut v = vec![T::zero(); self.states()];
        for &s in &self.accepting {
            v[s] = T::one();
        }
        v
    }

    pub fn run(&self, mut dist: Vec<T>, symbols: &[usize]) -> Vec<T> {
        for &s in symbols {
            dist = self.transitions[s].left_mul_vec(&dist);
        }
        dist
    }

    /// State distribution after reading `symbols` (no end-marker).
    pub fn distribution_after(&self, symbols: &[usize]) -> Vec<T> {
        self.run(self.initial.clone(), symbols)
    }

    /// `P_# 1_F`, the acceptance probability of each state at the end-marker.
    pub fn endmarker_acceptance(&self) -> Vec<T> {
        self.endmarker.mul_vec(&self.accepting_indicator())
    }

    /// `P_y P_# 1_F`: conditional acceptance of each state when `symbols` and
    /// the end-marker are still to be read.
    pub fn suffix_acceptance(&self, symbols: &[usize]) -> Vec<T> {
        let mut col = self.endmarker_acceptance();
        for &s in symbols.iter().rev() {
            col = self.transitions[s].mul_vec(&col);
        }
        col
    }

    pub fn evaluate_indices(&self, symbols: &[usize]) -> T {
        let dist = self.distribution_after(symbols);
        let end = self.endmarker_acceptance();
        dist.iter()
            .zip(&end)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn evaluate(&self, word: &Word) -> Result<T> {
        Ok(self.evaluate_indices(&self.alphabet.resolve(word)?))
    }

    pub fn to_float(&self) -> Pfa<f64> {
        Pfa {
            alphabet: self.alphabet.clone(),
            initial: self.initial.iter().map(T::to_f64).collect(),
            transitions: self.transitions.iter().map(|m| m.map(T::to_f64)).collect(),
            endmarker: self.endmarker.map(T::to_f64),
            accepting: self.accepting.clone(),
        }
    }

    /// Replace one transition matrix without re-validating stochasticity.
    /// Used to build deliberately corrupted automata in verification tests.
    pub fn with_transition_unchecked(mut self, symbol: usize, m: Matrix<T>) -> Self {
        self.transitions[symbol] = m;
        self
    }
}

/// Acceptance probability including the end-marker step.
pub fn evaluate_pfa<T: Scalar>(pfa: &Pfa<T>, word: &Word) -> Result<T> {
    pfa.evaluate(word)
}

impl<T: Scalar> Automaton for Pfa<T> {
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
    use crate::scalar::Rational;

    #[test]
    fn identity_endmarker_all_accepting() {
        let swap = RealMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = Pfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec![0.3, 0.7],
            vec![swap],
            RealMatrix::identity(2),
            vec![0, 1],
        )
        .unwrap();
        for n in 0..5 {
            assert!((p.evaluate_indices(&vec![0; n]) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_accepting_set() {
        let p = Pfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec![1.0],
            vec![RealMatrix::identity(1)],
            RealMatrix::identity(1),
            vec![],
        )
        .unwrap();
        assert_eq!(p.evaluate(&"a a".parse().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn exact_mode_and_suffix_factorization() {
        let r = |n, d| Rational::from_ratio(n, d);
        let pa = Matrix::from_rows(vec![vec![r(1, 3), r(2, 3)], vec![r(1, 2), r(1, 2)]]).unwrap();
        let pb = Matrix::from_rows(vec![vec![r(1, 1), r(0, 1)], vec![r(1, 4), r(3, 4)]]).unwrap();
        let end = Matrix::from_rows(vec![vec![r(1, 5), r(4, 5)], vec![r(0, 1), r(1, 1)]]).unwrap();
        let p = Pfa::new(
            Alphabet::new(["a", "b"]).unwrap(),
            vec![r(1, 2), r(1, 2)],
            vec![pa, pb],
            end,
            vec![0],
        )
        .unwrap();
        let x = [0, 1];
        let y = [1, 0, 0];
        let whole: Vec<usize> = x.iter().chain(&y).copied().collect();
        let a = p.distribution_after(&x);
        let b = p.suffix_acceptance(&y);
        let split = a.iter().zip(&b).fold(r(0, 1), |acc, (u, v)| acc + u * v);
        assert_eq!(split, p.evaluate_indices(&whole));
        let v = p.evaluate_indices(&whole);
        assert!(v >= r(0, 1) && v <= r(1, 1));
    }

    #[test]
    fn rejects_non_stochastic() {
        let a = Alphabet::new(["a"]).unwrap();
        let bad = RealMatrix::from_rows(vec![vec![0.5, 0.6], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            Pfa::new(a.clone(), vec![1.0, 0.0], vec![bad], RealMatrix::identity(2), vec![]),
            Err(Error::NotStochastic(_))
        ));
        assert!(Pfa::new(a.clone(), vec![0.5, 0.4], vec![RealMatrix::identity(2)], RealMatrix::identity(2), vec![]).is_err());
        assert!(Pfa::new(a, vec![1.0, 0.0], vec![RealMatrix::identity(2)], RealMatrix::identity(2), vec![3]).is_err());
        let r = Rational::from_ratio;
        let neg = Matrix::from_rows(vec![vec![r(3, 2), r(-1, 2)], vec![r(0, 1), r(1, 1)]]).unwrap();
        assert!(Pfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec![r(1, 1), r(0, 1)],
            vec![neg],
            Matrix::identity(2),
            vec![]
        )
        .is_err());
    }
}
