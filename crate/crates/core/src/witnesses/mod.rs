//! Prepare–test witness automata and their verification.
//!
//! Each witness has `d` prepare symbols `p:1 … p:d` and one test symbol
//! `tau:±±…` per selected sign vector `η`. On the two-letter words `p_ℓ τ_η`
//! the acceptance value lies above `1/2` exactly when `η_ℓ = +1`.

mod channels;
mod eta;
mod moqfa_witness;
mod qcfa_witness;

pub use channels::{effect_channel, replacement_channel};
pub use eta::{eta_columns, eta_vectors, prepare_symbol, tau_symbol, EtaMode};
pub use moqfa_witness::{
    balanced_test_states, build_moqfa_witness, orbit_jacobian, prepare_unitary, MoqfaWitnessBundle,
};
pub use qcfa_witness::{build_qcfa_witness, QcfaWitnessBundle};

use rayon::prelude::*;
use serde::Serialize;

use crate::automata::{member, Alphabet, Automaton, CutpointSpec, Word};
use crate::error::Result;
use crate::signrank::SignMatrix;
use crate::tolerance::TAU_EQ;

/// Prefixes `p_ℓ`, tests `τ_η` and the sign pattern they should produce.
#[derive(Clone, Debug)]
pub struct WitnessGrid {
    pub d: usize,
    pub prefixes: Vec<Vec<usize>>,
    pub tests: Vec<Vec<usize>>,
    pub expected: SignMatrix,
}

impl WitnessGrid {
    pub(crate) fn new(alphabet: &Alphabet, d: usize, etas: &[Vec<i8>]) -> Self {
        let expected = SignMatrix::from_fn(d, etas.len(), |l, j| etas[j][l])
            .with_labels(
                alphabet.symbols()[..d].to_vec(),
                alphabet.symbols()[d..d + etas.len()].to_vec(),
            )
            .expect("label counts match");
        Self {
            d,
            prefixes: (0..d).map(|l| vec![l]).collect(),
            tests: (0..etas.len()).map(|j| vec![d + j]).collect(),
            expected,
        }
    }

    /// The word `p_ℓ τ_{η_j}` as symbol indices.
    pub fn pair(&self, l: usize, j: usize) -> Vec<usize> {
        vec![l, self.d + j]
    }

    pub fn pairs(&self) -> usize {
        self.prefixes.len() * self.tests.len()
    }

    /// All `p_ℓ τ_η` words, row-major in `(ℓ, η)`.
    pub fn words(&self) -> Vec<Vec<usize>> {
        (0..self.prefixes.len())
            .flat_map(|l| (0..self.tests.len()).map(move |j| (l, j)))
            .map(|(l, j)| self.pair(l, j))
            .collect()
    }

    pub fn prefix_words(&self, alphabet: &Alphabet) -> Vec<Word> {
        self.prefixes.iter().map(|p| alphabet.word_from_indices(p)).collect()
    }

    pub fn test_words(&self, alphabet: &Alphabet) -> Vec<Word> {
        self.tests.iter().map(|t| alphabet.word_from_indices(t)).collect()
    }
}

/// Outcome of evaluating every prefix–suffix concatenation against an
/// expected sign pattern.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShatteringReport {
    pub pairs_checked: usize,
    pub agreements: usize,
    /// `min |f − λ|` over all pairs.
    pub min_margin: f64,
    pub ambiguous_count: usize,
    /// First `(prefix, suffix)` index pair whose sign disagrees.
    pub first_disagreement: Option<(usize, usize)>,
}

impl ShatteringReport {
    pub fn passed(&self) -> bool {
        self.agreements == self.pairs_checked && self.ambiguous_count == 0
    }
}

/// Evaluates `f(xy)` for all pairs and compares strict-cutpoint signs with
/// `expected` (rows are prefixes, columns suffixes).
pub fn verify_shattering<A: Automaton + ?Sized>(
    automaton: &A,
    prefixes: &[Vec<usize>],
    suffixes: &[Vec<usize>],
    lambda: f64,
    expected: &SignMatrix,
) -> Result<ShatteringReport> {
    if expected.rows() != prefixes.len() || expected.cols() != suffixes.len() {
        return Err(crate::Error::dims(
            format!("{}x{} expected signs", prefixes.len(), suffixes.len()),
            format!("{}x{}", expected.rows(), expected.cols()),
        ));
    }
    let spec = CutpointSpec::new(lambda).with_tolerance(TAU_EQ);
    let cols = suffixes.len();
    let outcomes: Vec<(f64, bool, bool)> = (0..prefixes.len() * cols)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / cols, k % cols);
            let mut w = prefixes[i].clone();
            w.extend_from_slice(&suffixes[j]);
            let f = automaton.acceptance_indices(&w);
            let m = member(f, &spec);
            ((f - lambda).abs(), m.ambiguous, m.sign == expected.get(i, j))
        })
        .collect();
    let first_disagreement = outcomes
        .iter()
        .position(|o| !o.2)
        .map(|k| (k / cols, k % cols));
    Ok(ShatteringReport {
        pairs_checked: outcomes.len(),
        agreements: outcomes.iter().filter(|o| o.2).count(),
        min_margin: outcomes.iter().map(|o| o.0).fold(f64::INFINITY, f64::min),
        ambiguous_count: outcomes.iter().filter(|o| o.1).count(),
        first_disagreement,
    })
}

/// Shattering check of a QCFA witness on its own grid, plus the deviation
/// from the exact value `1/2 + t·η_ℓ`.
pub fn verify_qcfa_witness(bundle: &QcfaWitnessBundle) -> Result<(ShatteringReport, f64)> {
    let grid = bundle.grid();
    let report = verify_shattering(&bundle.automaton, &grid.prefixes, &grid.tests, 0.5, &grid.expected)?;
    let deviation = grid
        .words()
        .par_iter()
        .map(|w| {
            let (l, j) = (w[0], w[1] - bundle.d);
            let want = 0.5 + bundle.t * bundle.etas[j][l] as f64;
            (bundle.automaton.evaluate_indices(w) - want).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok((report, deviation))
}

/// Residuals `δ = f(p_j τ_η) − 1/2 − t·η_j − (r − s)t²` of a MO witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub pairs_checked: usize,
    pub max_residual: f64,
    pub bound: f64,
    pub min_margin: f64,
    pub within_bound: bool,
}

pub fn verify_moqfa_expansion(bundle: &MoqfaWitnessBundle) -> ExpansionReport {
    let grid = bundle.grid();
    let shift = bundle.second_order_shift();
    let stats: Vec<(f64, f64)> = grid
        .words()
        .par_iter()
        .map(|w| {
            let (l, j) = (w[0], w[1] - bundle.d);
            let f = bundle.automaton.evaluate_indices(w);
            let delta = f - 0.5 - bundle.t * bundle.etas[j][l] as f64 - shift;
            (delta.abs(), (f - 0.5).abs())
        })
        .collect();
    let max_residual = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let bound = bundle.remainder_bound();
    ExpansionReport {
        pairs_checked: stats.len(),
        max_residual,
        bound,
        min_margin: stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        within_bound: max_residual <= bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Moqfa;
    use crate::opcore::ComplexMatrix;

    #[test]
    fn qcfa_witness_shatters() {
        let b = build_qcfa_witness(2, 2, EtaMode::Full).unwrap();
        let (rep, dev) = verify_qcfa_witness(&b).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.pairs_checked, 7 * 128);
        assert!((rep.min_margin - b.t).abs() < 1e-10);
        assert!(dev < 1e-10);
    }

    #[test]
    fn moqfa_expansion_bounds() {
        for n in [2, 3] {
            let b = build_moqfa_witness(n, EtaMode::Full).unwrap();
            let rep = verify_moqfa_expansion(&b);
            assert!(rep.within_bound, "n={n}: {rep:?}");
            assert!(rep.min_margin >= 43.0 / 48.0 * b.t);
            let grid = b.grid();
            let s = verify_shattering(&b.automaton, &grid.prefixes, &grid.tests, 0.5, &grid.expected).unwrap();
            assert!(s.passed());
        }
    }

    #[test]
    fn zero_margin_collapses_signs() {
        let b = build_moqfa_witness(2, EtaMode::Full).unwrap();
        let mut us = b.automaton.unitaries().to_vec();
        for u in us.iter_mut().skip(b.d) {
            *u = ComplexMatrix::identity(2);
        }
        let flat = Moqfa::new(
            b.automaton.alphabet().clone(),
            b.automaton.initial().to_vec(),
            us,
            b.automaton.accept().clone(),
        )
        .unwrap();
        let grid = b.grid();
        let rep = verify_shattering(&flat, &grid.prefixes, &grid.tests, 0.5, &grid.expected).unwrap();
        assert!(!rep.passed());
        assert!(rep.first_disagreement.is_some());
        assert!(rep.ambiguous_count > 0);
    }
}
