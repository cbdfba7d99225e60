use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::automata::{Alphabet, Qcfa};
use crate::error::{Error, Result};
use crate::opcore::{
    operator_norm, ComplexMatrix, DensityOperator, EffectOperator, HermitianBasis, HermitianOperator,
    KrausChannel, Projector, RealMatrix,
};

use super::channels::{effect_channel, replacement_channel};
use super::eta::{eta_vectors, prepare_symbol, tau_symbol, EtaMode};
use super::WitnessGrid;

const MAX_EPSILON_HALVINGS: usize = 10;

/// The classical-quantum shattering witness with `d = cq² − 1` prepared
/// configurations `ζ_ℓ = |a_ℓ⟩⟨a_ℓ| ⊗ θ_{b_ℓ}`.
#[derive(Clone, Debug)]
pub struct QcfaWitnessBundle {
    pub automaton: Qcfa,
    pub c: usize,
    pub q: usize,
    pub d: usize,
    /// Test margin: `f(p_ℓ τ_η) = 1/2 + t·η_ℓ`.
    pub t: f64,
    /// Upper bound on `max_η ‖X_η‖` used to choose `t`.
    pub m_bound: f64,
    /// Perturbation size in `θ_k = I/q + ε·B_k`.
    pub epsilon: f64,
    /// `(a_ℓ, b_ℓ)` for each prepared configuration.
    pub configs: Vec<(usize, usize)>,
    pub thetas: Vec<DensityOperator>,
    pub etas: Vec<Vec<i8>>,
    pub eta_mode: EtaMode,
    gram_inverse: RealMatrix,
}

fn perturbed_states(basis: &HermitianBasis) -> Result<(f64, Vec<DensityOperator>)> {
    let q = basis.dim();
    let max_norm = basis
        .traceless()
        .iter()
        .map(|b| operator_norm(b.matrix()))
        .fold(0.0, f64::max);
    let mixed = ComplexMatrix::identity(q).scale(&C64::new(1.0 / q as f64, 0.0));
    let mut epsilon = 1.0 / (2.0 * q as f64 * max_norm);
    for _ in 0..=MAX_EPSILON_HALVINGS {
        let thetas: Result<Vec<DensityOperator>> = std::iter::once(DensityOperator::new(mixed.clone()))
            .chain(basis.traceless().iter().map(|b| {
                DensityOperator::new(&mixed + &b.matrix().scale(&C64::new(epsilon, 0.0)))
            }))
            .collect();
        match thetas {
            Ok(t) => return Ok((epsilon, t)),
            Err(Error::NotPositive(_)) => epsilon /= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidParameter("could not find a positive perturbation size".into()))
}

/// Inverse of a symmetric positive definite matrix and its operator norm.
fn spd_inverse(g: &RealMatrix) -> Result<(RealMatrix, f64)> {
    let eig = HermitianOperator::new_unchecked(g.to_complex()).eigh();
    let min = eig.min();
    if min <= 0.0 {
        return Err(Error::NotPositive(min));
    }
    let n = g.rows();
    let v = &eig.vectors;
    let inv = RealMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| (v[(i, k)] * v[(j, k)].conj()).re / eig.values[k])
            .sum()
    });
    Ok((inv, 1.0 / min))
}

impl QcfaWitnessBundle {
    pub fn build(c: usize, q: usize, eta_mode: EtaMode) -> Result<Self> {
        if c < 2 || q < 2 {
            return Err(Error::InvalidParameter(format!("QCFA witness needs c >= 2 and q >= 2, got c = {c}, q = {q}")));
        }
        let d = c * q * q - 1;
        let etas = eta_vectors(d, eta_mode)?;
        let basis = HermitianBasis::gell_mann(q)?;
        let (epsilon, thetas) = perturbed_states(&basis)?;

        let configs: Vec<(usize, usize)> = (0..c)
            .flat_map(|i| (0..q * q).map(move |k| (i, k)))
            .take(d)
            .collect();
        let overlap = |a: usize, b: usize| -> f64 {
            (thetas[a].matrix() * thetas[b].matrix()).trace().re
        };
        let gram = RealMatrix::from_fn(d, d, |l, m| {
            let ((a1, b1), (a2, b2)) = (configs[l], configs[m]);
            if a1 == a2 {
                overlap(b1, b2)
            } else {
                0.0
            }
        });
        let (gram_inverse, inv_norm) = spd_inverse(&gram)?;
        let max_zeta = thetas.iter().map(|t| operator_norm(t.matrix())).fold(0.0, f64::max);
        let m_bound = d as f64 * inv_norm * max_zeta;
        let t = 1.0 / (4.0 * m_bound);

        let mut symbols: Vec<String> = (1..=d).map(prepare_symbol).collect();
        symbols.extend(etas.iter().map(|e| tau_symbol(e)));
        let alphabet = Alphabet::new(symbols)?;

        let prepare: Vec<Arc<KrausChannel>> = configs
            .iter()
            .map(|&(_, b)| replacement_channel(&thetas[b]).map(Arc::new))
            .collect::<Result<_>>()?;
        let mut bundle = Self {
            automaton: Qcfa::new(
                Alphabet::new(Vec::<String>::new())?,
                1,
                0,
                DensityOperator::maximally_mixed(q),
                vec![vec![]],
                vec![vec![]],
                EffectOperator::new(ComplexMatrix::identity(q))?,
            )?,
            c,
            q,
            d,
            t,
            m_bound,
            epsilon,
            configs,
            thetas,
            etas,
            eta_mode,
            gram_inverse,
        };
        let mut tests: Vec<Vec<Arc<KrausChannel>>> = vec![Vec::with_capacity(bundle.etas.len()); c];
        for eta in &bundle.etas {
            for (i, e) in bundle.effect_blocks(eta)?.iter().enumerate() {
                tests[i].push(Arc::new(effect_channel(e, q)?));
            }
        }

        let mut delta = Vec::with_capacity(c);
        let mut channels = Vec::with_capacity(c);
        for (i, test_row) in tests.into_iter().enumerate() {
            let mut row_d: Vec<usize> = bundle.configs.iter().map(|&(a, _)| a).collect();
            row_d.extend(std::iter::repeat_n(i, bundle.etas.len()));
            let mut row_c = prepare.clone();
            row_c.extend(test_row);
            delta.push(row_d);
            channels.push(row_c);
        }
        let accept = EffectOperator::from(Projector::coordinate(q, &[0])?);
        bundle.automaton = Qcfa::new(alphabet, c, 0, DensityOperator::maximally_mixed(q), delta, channels, accept)?;
        log::info!("QCFA witness (c={c}, q={q}): d={d}, t={t:e}, {} tests", bundle.etas.len());
        Ok(bundle)
    }

    /// `α = G⁻¹η`.
    pub fn coefficients(&self, eta: &[i8]) -> Vec<f64> {
        let eta: Vec<f64> = eta.iter().map(|&s| s as f64).collect();
        self.gram_inverse.mul_vec(&eta)
    }

    /// Diagonal blocks `X^{(i)} = Σ_{a_ℓ = i} α_ℓ θ_{b_ℓ}` of `X_η`.
    pub fn x_blocks(&self, eta: &[i8]) -> Vec<ComplexMatrix> {
        let alpha = self.coefficients(eta);
        let mut blocks = vec![ComplexMatrix::zeros(self.q, self.q); self.c];
        for (l, &(a, b)) in self.configs.iter().enumerate() {
            blocks[a] = &blocks[a] + &self.thetas[b].matrix().scale(&C64::new(alpha[l], 0.0));
        }
        blocks
    }

    /// Blocks `E^{(i)} = I/2 + t·X^{(i)}`.
    pub fn effect_blocks(&self, eta: &[i8]) -> Result<Vec<EffectOperator>> {
        let half = ComplexMatrix::identity(self.q).scale(&C64::new(0.5, 0.0));
        self.x_blocks(eta)
            .iter()
            .map(|x| EffectOperator::new(&half + &x.scale(&C64::new(self.t, 0.0))))
            .collect()
    }

    /// `max_ℓ |Tr(X_η ζ_ℓ) − η_ℓ|`.
    pub fn gram_residual(&self, eta: &[i8]) -> f64 {
        let blocks = self.x_blocks(eta);
        self.configs
            .iter()
            .zip(eta)
            .map(|(&(a, b), &s)| ((&blocks[a] * self.thetas[b].matrix()).trace().re - s as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn grid(&self) -> WitnessGrid {
        WitnessGrid::new(self.automaton.alphabet(), self.d, &self.etas)
    }

    pub fn meta(&self) -> Value {
        json!({
            "kind": "qcfa",
            "c": self.c,
            "q": self.q,
            "d": self.d,
            "t": self.t,
            "M_bound": self.m_bound,
            "epsilon": self.epsilon,
            "configs": self.configs,
            "eta_mode": self.eta_mode,
            "seed": self.eta_mode.seed(),
            "tests": self.etas.len(),
        })
    }
}

pub fn build_qcfa_witness(c: usize, q: usize, eta_mode: EtaMode) -> Result<QcfaWitnessBundle> {
    QcfaWitnessBundle::build(c, q, eta_mode)
}
