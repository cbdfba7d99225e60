use crate::error::{Error, Result};
use crate::opcore::{vec_norm, ComplexMatrix, Projector, C64};

use super::word::{Alphabet, Word};
use super::Automaton;

const NORM_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

/// Measure-once quantum automaton: unitaries on a pure state, one projective
/// measurement at the end.
#[derive(Clone, Debug)]
pub struct Moqfa {
    alphabet: Alphabet,
    initial: Vec<C64>,
    unitaries: Vec<ComplexMatrix>,
    accept: Projector,
}

impl Moqfa {
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<C64>,
        unitaries: Vec<ComplexMatrix>,
        accept: Projector,
    ) -> Result<Self> {
        let n = initial.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty state space".into()));
        }
        let norm = vec_norm(&initial);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        if unitaries.len() != alphabet.len() {
            return Err(Error::dims(format!("{} unitaries", alphabet.len()), unitaries.len()));
        }
        for u in &unitaries {
            u.require_shape(n, n)?;
            let defect = u.unitarity_defect();
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary(defect));
            }
        }
        if accept.dim() != n {
            return Err(Error::dims(n, accept.dim()));
        }
        Ok(Self {
            alphabet,
            initial,
            unitaries,
            accept,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &[C64] {
        &self.initial
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn unitary(&self, symbol: usize) -> &ComplexMatrix {
        &self.unitaries[symbol]
    }

    pub fn accept(&self) -> &Projector {
        &self.accept
    }

    pub fn run_state(&self, mut psi: Vec<C64>, symbols: &[usize]) -> Vec<C64> {
        for &s in symbols {
            psi = self.unitaries[s].mul_vec(&psi);
        }
        psi
    }

    /// `⟨ψ|P|ψ⟩` clamped to `[0, 1]`.
    pub fn measure(&self, psi: &[C64]) -> f64 {
        self.accept.operator().expectation(psi).clamp(0.0, 1.0)
    }

    pub fn evaluate_indices(&self, symbols: &[usize]) -> f64 {
        self.measure(&self.run_state(self.initial.clone(), symbols))
    }

    pub fn evaluate(&self, word: &Word) -> Result<f64> {
        Ok(self.evaluate_indices(&self.alphabet.resolve(word)?))
    }
}

pub fn evaluate_moqfa(q: &Moqfa, word: &Word) -> Result<f64> {
    q.evaluate(word)
}

impl Automaton for Moqfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn acceptance_indices(&self, symbols: &[usize]) -> f64 {
        self.evaluate_indices(symbols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::basis_vector;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_moqfa(n: usize, seed: u64) -> Moqfa {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let us = (0..2).map(|_| sampling::random_unitary(n, &mut rng)).collect();
        Moqfa::new(
            Alphabet::new(["a", "b"]).unwrap(),
            sampling::random_unit_vector(n, &mut rng),
            us,
            Projector::coordinate(n, &[0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn initial_measurement() {
        let q = Moqfa::new(
            Alphabet::new(["a"]).unwrap(),
            basis_vector(2, 1),
            vec![ComplexMatrix::identity(2)],
            Projector::coordinate(2, &[1]).unwrap(),
        )
        .unwrap();
        assert_eq!(q.evaluate(&Word::empty()).unwrap(), 1.0);
    }

    #[test]
    fn norm_preserved_on_long_words() {
        let q = random_moqfa(4, 11);
        let word: Vec<usize> = (0..100).map(|i| (i * 7 + 3) % 2).collect();
        let psi = q.run_state(q.initial().to_vec(), &word);
        assert!((vec_norm(&psi) - 1.0).abs() < 1e-10);
        let f = q.evaluate_indices(&word);
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn run_state_threads() {
        let q = random_moqfa(3, 12);
        let a = q.run_state(q.run_state(q.initial().to_vec(), &[0, 1]), &[1, 0, 0]);
        let b = q.run_state(q.initial().to_vec(), &[0, 1, 1, 0, 0]);
        let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).sum();
        assert!(d < 1e-13);
    }

    #[test]
    fn validation() {
        let a = Alphabet::new(["a"]).unwrap();
        let p = Projector::coordinate(2, &[0]).unwrap();
        let half: Vec<C64> = vec![C64::new(0.5, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(
            Moqfa::new(a.clone(), half, vec![ComplexMatrix::identity(2)], p.clone()),
            Err(Error::NotNormalized(_))
        ));
        let not_u = ComplexMatrix::identity(2).scale(&C64::new(2.0, 0.0));
        assert!(matches!(
            Moqfa::new(a, basis_vector(2, 0), vec![not_u], p),
            Err(Error::NotUnitary(_))
        ));
    }
}
