//! Exact linearization of quantum automata into generalized finite automata.
//!
//! A classical-quantum configuration `Σ_s |s⟩⟨s| ⊗ ρ_s` is encoded by the
//! concatenated Gell-Mann coordinates of the blocks `ρ_s`. Each symbol then
//! acts linearly on these `c·q²` real coordinates.

use rayon::prelude::*;

use crate::automata::{Gfa, Moqfa, Qcfa};
use crate::error::{Error, Result};
use crate::opcore::{ComplexMatrix, EffectOperator, HermitianBasis, KrausChannel, RealMatrix};

/// Concatenated per-block Hermitian coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCoordinates {
    c: usize,
    q: usize,
    vector: Vec<f64>,
}

impl BlockCoordinates {
    pub fn new(c: usize, q: usize, vector: Vec<f64>) -> Result<Self> {
        if vector.len() != c * q * q {
            return Err(Error::dims(c * q * q, vector.len()));
        }
        Ok(Self { c, q, vector })
    }

    /// Coordinates of `Σ_s |s⟩⟨s| ⊗ blocks[s]`.
    pub fn from_blocks(basis: &HermitianBasis, blocks: &[ComplexMatrix]) -> Result<Self> {
        let q = basis.dim();
        let mut vector = Vec::with_capacity(blocks.len() * q * q);
        for b in blocks {
            vector.extend(basis.coordinates(b)?);
        }
        Self::new(blocks.len(), q, vector)
    }

    /// `|s⟩⟨s| ⊗ ρ` among `c` classical states.
    pub fn classical_quantum(basis: &HermitianBasis, c: usize, s: usize, rho: &ComplexMatrix) -> Result<Self> {
        if s >= c {
            return Err(Error::InvalidParameter(format!("state {s} out of range")));
        }
        let q = basis.dim();
        let mut vector = vec![0.0; c * q * q];
        vector[s * q * q..(s + 1) * q * q].copy_from_slice(&basis.coordinates(rho)?);
        Self::new(c, q, vector)
    }

    pub fn blocks(&self) -> usize {
        self.c
    }

    pub fn block_dim(&self) -> usize {
        self.q
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn into_vector(self) -> Vec<f64> {
        self.vector
    }

    pub fn block(&self, s: usize) -> &[f64] {
        let w = self.q * self.q;
        &self.vector[s * w..(s + 1) * w]
    }
}

/// Column `j` holds the coordinates of `Φ(B_j)`.
pub fn channel_transfer_matrix(channel: &KrausChannel, basis: &HermitianBasis) -> Result<RealMatrix> {
    let q = basis.dim();
    if channel.dim_in() != q || channel.dim_out() != q {
        return Err(Error::dims(q, channel.dim_in().max(channel.dim_out())));
    }
    let n = basis.len();
    let mut m = RealMatrix::zeros(n, n);
    for (j, b) in basis.elements().iter().enumerate() {
        let img = channel.apply_raw(b.matrix());
        for (i, x) in basis.coordinates(&img)?.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

/// `v_j = Tr(E B_j)`, so that `Tr(E ρ) = v · coords(ρ)`.
pub fn effect_readout(effect: &EffectOperator, basis: &HermitianBasis) -> Result<Vec<f64>> {
    basis.coordinates(effect.matrix())
}

/// The block matrix `M_σ` acting on column coordinates:
/// block `(δ(s,σ), s)` is the transfer matrix of `Φ_{s,σ}`.
pub fn symbol_transfer_matrix(qcfa: &Qcfa, symbol: usize, basis: &HermitianBasis) -> Result<RealMatrix> {
    let c = qcfa.classical_states();
    let w = basis.len();
    let mut m = RealMatrix::zeros(c * w, c * w);
    for s in 0..c {
        let t = qcfa.delta(s, symbol);
        let block = channel_transfer_matrix(qcfa.channel(s, symbol), basis)?;
        m.set_block(t * w, s * w, &block);
    }
    Ok(m)
}

/// A `c·q²`-state GFA with `f_G(w) = f_A(w)` for every word.
pub fn qcfa_to_gfa(qcfa: &Qcfa) -> Result<Gfa<f64>> {
    let basis = HermitianBasis::gell_mann(qcfa.quantum_dim())?;
    let c = qcfa.classical_states();
    let transitions = (0..qcfa.alphabet().len())
        .into_par_iter()
        .map(|sym| symbol_transfer_matrix(qcfa, sym, &basis).map(|m| m.transpose()))
        .collect::<Result<Vec<_>>>()?;
    let initial = BlockCoordinates::classical_quantum(
        &basis,
        c,
        qcfa.initial_classical(),
        qcfa.initial_quantum().matrix(),
    )?
    .into_vector();
    let v_acc = effect_readout(qcfa.accept(), &basis)?;
    let final_vector = v_acc.iter().copied().cycle().take(c * v_acc.len()).collect();
    Gfa::new(qcfa.alphabet().clone(), initial, transitions, final_vector)
}

/// An `n²`-state GFA treating each unitary as the channel `ρ ↦ UρU†`.
pub fn moqfa_to_gfa(moqfa: &Moqfa) -> Result<Gfa<f64>> {
    let basis = HermitianBasis::gell_mann(moqfa.dim())?;
    let transitions = moqfa
        .unitaries()
        .par_iter()
        .map(|u| channel_transfer_matrix(&KrausChannel::unitary(u)?, &basis).map(|m| m.transpose()))
        .collect::<Result<Vec<_>>>()?;
    let psi = moqfa.initial();
    let initial = basis.coordinates(&ComplexMatrix::outer(psi, psi))?;
    let final_vector = basis.coordinates(moqfa.accept().matrix())?;
    Gfa::new(moqfa.alphabet().clone(), initial, transitions, final_vector)
}
