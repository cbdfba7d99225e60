//! Conversion of a generalized automaton with strict cutpoint `λ` into a
//! probabilistic automaton with `2k+6` states and strict cutpoint `1/2`.
//!
//! The chain absorbs the cutpoint into an extra affine coordinate, embeds the
//! result into zero-row-sum matrices, shifts by a multiple of the all-ones
//! matrix to reach stochastic matrices, splits the signed initial vector into
//! two probability blocks and finally folds the (shifted, scaled) final
//! vector into the end-marker. The acceptance value then satisfies
//!
//! ```text
//! f_P(w) − 1/2 = (f_G(w) − λ) · (c·m)^{−|w|} / (2·T·b)
//! ```
//!
//! with the constants recorded in [`ConversionReport`].

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::automata::{enumerate_words, member, Automaton, CutpointSpec, Gfa, Pfa, Word};
use crate::error::{Error, Result};
use crate::opcore::Matrix;
use crate::scalar::Scalar;
use crate::tolerance::TAU_EQ;

/// Constants of one conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct ConversionReport<T> {
    pub input_states: usize,
    pub output_states: usize,
    /// Positivity shift `c`.
    pub shift: T,
    /// Embedding dimension `m = k + 3`.
    pub scale: usize,
    /// Offset `a` of the final-vector normalization.
    pub offset: T,
    /// Divisor `b` of the final-vector normalization.
    pub divisor: T,
    /// Mass `T` of each half of the split initial vector.
    pub block_mass: T,
}

impl<T: Scalar> ConversionReport<T> {
    /// `1/2 + g·(c·m)^{−len}/(2·T·b)`.
    pub fn predicted_acceptance(&self, gap: &T, len: usize) -> T {
        let cm = self.shift.clone() * T::from_ratio(self.scale as i64, 1);
        let mut denom = T::from_ratio(2, 1) * self.block_mass.clone() * self.divisor.clone();
        for _ in 0..len {
            denom = denom * cm.clone();
        }
        T::from_ratio(1, 2) + gap.clone() / denom
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scalar_mode": T::MODE,
            "input_states": self.input_states,
            "output_states": self.output_states,
            "c": self.shift.to_json(),
            "m": self.scale,
            "a": self.offset.to_json(),
            "b": self.divisor.to_json(),
            "T": self.block_mass.to_json(),
        })
    }
}

fn max_abs<T: Scalar>(values: impl Iterator<Item = T>) -> T {
    values.fold(T::zero(), |acc, x| T::max_of(acc, x.abs()))
}

/// Returns the `2k+6`-state PFA (cutpoint `1/2`) and the conversion constants.
pub fn gfa_to_pfa<T: Scalar>(gfa: &Gfa<T>, lambda: &T) -> Result<(Pfa<T>, ConversionReport<T>)> {
    let k = gfa.states();
    let m = k + 3;
    let one = T::one;

    // Cutpoint absorption: dimension k+1.
    let mut u_hat = gfa.initial().to_vec();
    u_hat.push(one());
    let mut v_hat = gfa.final_vector().to_vec();
    v_hat.push(-lambda.clone());

    // Zero-row-sum embedding: dimension m, first and last rows zero.
    let embedded: Vec<Matrix<T>> = gfa
        .transitions()
        .iter()
        .map(|a| {
            let mut c = Matrix::zeros(m, m);
            for i in 0..=k {
                let mut row_sum = T::zero();
                for j in 0..=k {
                    let x = if i < k && j < k {
                        a[(i, j)].clone()
                    } else if i == k && j == k {
                        one()
                    } else {
                        T::zero()
                    };
                    row_sum = row_sum + x.clone();
                    c[(i + 1, j + 1)] = x;
                }
                c[(i + 1, m - 1)] = -row_sum;
            }
            c
        })
        .collect();
    let mut pi0 = vec![T::zero(); m];
    let mut mass = T::zero();
    for (i, x) in u_hat.iter().enumerate() {
        pi0[i + 1] = x.clone();
        mass = mass + x.clone();
    }
    pi0[m - 1] = -mass;
    let mut eta = vec![T::zero(); m];
    for (i, x) in v_hat.iter().enumerate() {
        eta[i + 1] = x.clone();
    }

    // Positivity shift and rescaling.
    let shift = T::max_of(one(), max_abs(embedded.iter().flat_map(|c| c.as_slice().iter().cloned())));
    let cm = shift.clone() * T::from_ratio(m as i64, 1);
    let stochastic: Vec<Matrix<T>> = embedded
        .iter()
        .map(|c| c.map(|x| (x.clone() + shift.clone()) / cm.clone()))
        .collect();

    // Signed-measure doubling.
    let plus: Vec<T> = pi0.iter().map(|x| T::max_of(x.clone(), T::zero())).collect();
    let minus: Vec<T> = pi0.iter().map(|x| T::max_of(-x.clone(), T::zero())).collect();
    let block_mass = plus.iter().cloned().fold(T::zero(), |a, b| a + b);
    let two_t = T::from_ratio(2, 1) * block_mass.clone();
    let initial: Vec<T> = plus
        .iter()
        .chain(&minus)
        .map(|x| x.clone() / two_t.clone())
        .collect();
    let transitions: Vec<Matrix<T>> = stochastic
        .iter()
        .map(|p| {
            let mut d = Matrix::zeros(2 * m, 2 * m);
            d.set_block(0, 0, p);
            d.set_block(m, m, p);
            d
        })
        .collect();

    // Final-vector normalization folded into the end-marker.
    let min_eta = eta.iter().cloned().fold(T::zero(), |a, x| if x < a { x } else { a });
    let offset = -min_eta;
    let divisor = eta
        .iter()
        .fold(one(), |acc, x| T::max_of(acc, x.clone() + offset.clone()));
    let eta_prime: Vec<T> = eta
        .iter()
        .map(|x| (x.clone() + offset.clone()) / divisor.clone())
        .collect();
    let (accept_sink, reject_sink) = (0, m);
    let mut endmarker = Matrix::zeros(2 * m, 2 * m);
    for (i, e) in eta_prime.iter().enumerate() {
        endmarker[(i, accept_sink)] = e.clone();
        endmarker[(i, reject_sink)] = one() - e.clone();
        endmarker[(m + i, accept_sink)] = one() - e.clone();
        endmarker[(m + i, reject_sink)] = e.clone();
    }

    let pfa = Pfa::new(gfa.alphabet().clone(), initial, transitions, endmarker, vec![accept_sink])?;
    let report = ConversionReport {
        input_states: k,
        output_states: 2 * m,
        shift,
        scale: m,
        offset,
        divisor,
        block_mass,
    };
    log::debug!("stochasticized {k}-state GFA into {} states", 2 * m);
    Ok((pfa, report))
}

/// Outcome of comparing two automata's cutpoint languages word by word.
#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    pub words_checked: usize,
    pub agreements: usize,
    /// Words where either value sits within the tolerance of its cutpoint.
    pub ambiguous_count: usize,
    /// `min |f_P(w) − μ|` over non-ambiguous words.
    pub min_margin: f64,
    pub first_disagreement: Option<Disagreement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disagreement {
    pub word: Word,
    pub reference_value: f64,
    pub candidate_value: f64,
}

impl AgreementReport {
    pub fn agrees(&self) -> bool {
        self.first_disagreement.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "words_checked": self.words_checked,
            "agreements": self.agreements,
            "ambiguous_count": self.ambiguous_count,
            "min_margin": if self.min_margin.is_finite() { json!(self.min_margin) } else { Value::Null },
            "agrees": self.agrees(),
            "first_disagreement": self.first_disagreement.as_ref().map(|d| json!({
                "word": d.word.to_string(),
                "reference_value": d.reference_value,
                "candidate_value": d.candidate_value,
            })),
        })
    }
}

/// Compare `reference` at cutpoint `λ` with `candidate` at cutpoint `μ` on
/// the given words (symbol indices in the shared alphabet).
pub fn verify_sign_agreement_on<A, B>(
    reference: &A,
    lambda: f64,
    candidate: &B,
    mu: f64,
    words: &[Vec<usize>],
    tolerance: f64,
) -> Result<AgreementReport>
where
    A: Automaton + ?Sized,
    B: Automaton + ?Sized,
{
    if reference.alphabet() != candidate.alphabet() {
        return Err(Error::InvalidParameter("automata have different alphabets".into()));
    }
    let ref_spec = CutpointSpec::new(lambda).with_tolerance(tolerance);
    let cand_spec = CutpointSpec::new(mu).with_tolerance(tolerance);
    let outcomes: Vec<(usize, f64, f64, bool, bool)> = words
        .par_iter()
        .enumerate()
        .map(|(idx, w)| {
            let f = reference.acceptance_indices(w);
            let g = candidate.acceptance_indices(w);
            let (mf, mg) = (member(f, &ref_spec), member(g, &cand_spec));
            let ambiguous = mf.ambiguous || mg.ambiguous;
            (idx, f, g, ambiguous, ambiguous || mf.sign == mg.sign)
        })
        .collect();
    let mut report = AgreementReport {
        words_checked: words.len(),
        agreements: 0,
        ambiguous_count: 0,
        min_margin: f64::INFINITY,
        first_disagreement: None,
    };
    for (idx, f, g, ambiguous, ok) in outcomes {
        if ambiguous {
            report.ambiguous_count += 1;
        } else {
            report.min_margin = report.min_margin.min((g - mu).abs());
        }
        if ok {
            report.agreements += 1;
        } else if report.first_disagreement.is_none() {
            report.first_disagreement = Some(Disagreement {
                word: reference.alphabet().word_from_indices(&words[idx]),
                reference_value: f,
                candidate_value: g,
            });
        }
    }
    Ok(report)
}

/// Float-mode agreement over every word of length at most `max_len`.
pub fn verify_sign_agreement<A, B>(
    reference: &A,
    lambda: f64,
    candidate: &B,
    mu: f64,
    max_len: usize,
) -> Result<AgreementReport>
where
    A: Automaton + ?Sized,
    B: Automaton + ?Sized,
{
    let symbols: Vec<usize> = (0..reference.alphabet().len()).collect();
    let words = enumerate_words(&symbols, max_len);
    verify_sign_agreement_on(reference, lambda, candidate, mu, &words, TAU_EQ)
}

/// Exact agreement and closed-form check for exact scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactAgreement {
    pub words_checked: usize,
    pub sign_agreements: usize,
    pub closed_form_matches: usize,
    pub first_disagreement: Option<Word>,
}

impl ExactAgreement {
    pub fn holds(&self) -> bool {
        self.sign_agreements == self.words_checked && self.closed_form_matches == self.words_checked
    }
}

/// Every word up to `max_len` (shortest first) with its state row vector,
/// each layer extending the previous one by a single matrix product.
fn layered_states<T: Scalar>(initial: &[T], transitions: &[Matrix<T>], max_len: usize) -> Vec<(Vec<usize>, Vec<T>)> {
    let mut out = vec![(Vec::new(), initial.to_vec())];
    let mut layer_start = 0;
    for _ in 0..max_len {
        let layer_end = out.len();
        let next: Vec<(Vec<usize>, Vec<T>)> = out[layer_start..layer_end]
            .par_iter()
            .flat_map_iter(|(w, v)| {
                transitions.iter().enumerate().map(move |(s, m)| {
                    let mut w2 = w.clone();
                    w2.push(s);
                    (w2, m.left_mul_vec(v))
                })
            })
            .collect();
        out.extend(next);
        layer_start = layer_end;
    }
    out
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Checks `sgn(f_P − 1/2) = sgn(f_G − λ)` and the closed form on every word
/// of length at most `max_len`. Equality tests are exact for rational scalars.
pub fn verify_conversion_exact<T: Scalar>(
    gfa: &Gfa<T>,
    lambda: &T,
    pfa: &Pfa<T>,
    report: &ConversionReport<T>,
    max_len: usize,
) -> ExactAgreement {
    let g_states = layered_states(gfa.initial(), gfa.transitions(), max_len);
    let p_states = layered_states(pfa.initial(), pfa.transitions(), max_len);
    let end = pfa.endmarker_acceptance();
    let half = T::from_ratio(1, 2);
    let checks: Vec<(bool, bool)> = g_states
        .par_iter()
        .zip(&p_states)
        .map(|((w, gv), (_, pv))| {
            let gap = dot(gv, gfa.final_vector()) - lambda.clone();
            let fp = dot(pv, &end);
            let sign_ok = (gap > T::zero()) == (fp > half);
            let closed_ok = report.predicted_acceptance(&gap, w.len()) == fp;
            (sign_ok, closed_ok)
        })
        .collect();
    let first = checks
        .iter()
        .position(|(s, c)| !s || !c)
        .map(|i| gfa.alphabet().word_from_indices(&g_states[i].0));
    ExactAgreement {
        words_checked: checks.len(),
        sign_agreements: checks.iter().filter(|c| c.0).count(),
        closed_form_matches: checks.iter().filter(|c| c.1).count(),
        first_disagreement: first,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::opcore::RealMatrix;
    use crate::scalar::Rational;

    fn scalar_gfa<T: Scalar>(a: T) -> Gfa<T> {
        Gfa::new(
            Alphabet::new(["a"]).unwrap(),
            vec![T::one()],
            vec![Matrix::from_rows(vec![vec![a]]).unwrap()],
            vec![T::one()],
        )
        .unwrap()
    }

    #[test]
    fn doubling_gfa() {
        let g = scalar_gfa(2.0);
        let (p, rep) = gfa_to_pfa(&g, &3.0).unwrap();
        assert_eq!(p.states(), 8);
        assert_eq!(rep.output_states, 8);
        for n in 0..=6 {
            let w = vec![0; n];
            assert_eq!(p.evaluate_indices(&w) > 0.5, n >= 2, "len {n}");
        }
    }

    #[test]
    fn doubling_gfa_exact() {
        let r = Rational::from_ratio;
        let g = scalar_gfa(r(2, 1));
        let (p, rep) = gfa_to_pfa(&g, &r(3, 1)).unwrap();
        let check = verify_conversion_exact(&g, &r(3, 1), &p, &rep, 6);
        assert!(check.holds());
        for n in 0..=6 {
            let f = p.evaluate_indices(&vec![0; n]);
            assert_eq!(f > r(1, 2), (1i64 << n) > 3);
        }
    }

    #[test]
    fn halving_gfa_exact() {
        let r = Rational::from_ratio;
        let g = scalar_gfa(r(1, 2));
        let lambda = r(1, 4);
        let (p, rep) = gfa_to_pfa(&g, &lambda).unwrap();
        assert!(verify_conversion_exact(&g, &lambda, &p, &rep, 8).holds());
        for n in 0..=8 {
            assert_eq!(p.evaluate_indices(&vec![0; n]) > r(1, 2), n <= 1);
        }
    }

    #[test]
    fn zero_final_vector_sits_on_the_cutpoint() {
        let r = Rational::from_ratio;
        let g = Gfa::new(
            Alphabet::new(["a", "b"]).unwrap(),
            vec![r(1, 1), r(-2, 3)],
            vec![Matrix::identity(2), Matrix::zeros(2, 2)],
            vec![r(0, 1), r(0, 1)],
        )
        .unwrap();
        let (p, _) = gfa_to_pfa(&g, &r(0, 1)).unwrap();
        for w in enumerate_words(&[0, 1], 6) {
            assert_eq!(p.evaluate_indices(&w), r(1, 2));
        }
    }

    #[test]
    fn report_constants() {
        let g = scalar_gfa(2.0);
        let (_, rep) = gfa_to_pfa(&g, &3.0).unwrap();
        assert_eq!(rep.scale, 4);
        assert!(rep.block_mass >= 1.0);
        assert!(rep.shift >= 1.0);
        let js = rep.to_json();
        assert_eq!(js["output_states"], 8);
        assert_eq!(js["scalar_mode"], "float");
    }

    #[test]
    fn corrupted_pfa_is_caught() {
        let g = scalar_gfa(2.0);
        let (p, _) = gfa_to_pfa(&g, &3.0).unwrap();
        let mut bad = p.transitions()[0].clone();
        // push mass from the plus block's states toward the accept sink
        for i in 0..p.states() / 2 {
            bad[(i, 0)] += 0.1;
            bad[(i, 1)] -= 0.1;
        }
        let corrupted = p.with_transition_unchecked(0, bad);
        let rep = verify_sign_agreement(&g, 3.0, &corrupted, 0.5, 6).unwrap();
        assert!(!rep.agrees());
        assert!(rep.first_disagreement.is_some());
    }

    #[test]
    fn agreement_on_random_float_gfa() {
        let g = Gfa::new(
            Alphabet::new(["a", "b"]).unwrap(),
            vec![0.3, -1.2],
            vec![
                RealMatrix::from_rows(vec![vec![0.5, 1.0], vec![-0.7, 0.2]]).unwrap(),
                RealMatrix::from_rows(vec![vec![1.1, 0.0], vec![0.4, -0.9]]).unwrap(),
            ],
            vec![1.0, 0.5],
        )
        .unwrap();
        let (p, _) = gfa_to_pfa(&g, &0.1).unwrap();
        let rep = verify_sign_agreement(&g, 0.1, &p, 0.5, 4).unwrap();
        assert!(rep.agrees());
        assert_eq!(rep.words_checked, 31);
    }

    #[test]
    fn empty_alphabet_checks_only_epsilon() {
        let g = Gfa::<f64>::new(Alphabet::new(Vec::<String>::new()).unwrap(), vec![1.0], vec![], vec![2.0]).unwrap();
        let (p, _) = gfa_to_pfa(&g, &1.0).unwrap();
        let rep = verify_sign_agreement(&g, 1.0, &p, 0.5, 5).unwrap();
        assert_eq!(rep.words_checked, 1);
        assert!(rep.agrees());
    }
}
